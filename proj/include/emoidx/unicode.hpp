#pragma once

#include <string>
#include <string_view>

namespace emoidx {

// NFKC-normalizes UTF-8 text. Ill-formed sequences become U+FFFD.
std::string nfkc(std::string_view utf8);

} // namespace emoidx
