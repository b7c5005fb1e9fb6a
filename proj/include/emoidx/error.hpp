#pragma once

#include <stdexcept>
#include <string>

namespace emoidx {

// Bad input data: malformed files, violated data invariants, degenerate series.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration values (alpha <= 0, inverted windows, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace emoidx
