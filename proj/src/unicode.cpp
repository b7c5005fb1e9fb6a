#include "emoidx/unicode.hpp"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "emoidx/error.hpp"

namespace emoidx {

namespace {

const icu::Normalizer2& nfkc_instance() {
    static const icu::Normalizer2* instance = [] {
        UErrorCode status = U_ZERO_ERROR;
        const icu::Normalizer2* n = icu::Normalizer2::getNFKCInstance(status);
        if (U_FAILURE(status)) {
            throw std::runtime_error(std::string("ICU NFKC normalizer unavailable: ") + u_errorName(status));
        }
        return n;
    }();
    return *instance;
}

bool is_ascii(std::string_view s) {
    for (unsigned char c : s) {
        if (c >= 0x80) return false;
    }
    return true;
}

} // namespace

std::string nfkc(std::string_view utf8) {
    // Printable ASCII is NFKC-stable; skip the round trip through UTF-16.
    if (is_ascii(utf8)) return std::string(utf8);

    const icu::Normalizer2& norm = nfkc_instance();
    const icu::UnicodeString src =
        icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    UErrorCode status = U_ZERO_ERROR;
    const int32_t stable = norm.spanQuickCheckYes(src, status);
    std::string out;
    if (U_SUCCESS(status) && stable == src.length()) {
        src.toUTF8String(out);
        return out;
    }
    status = U_ZERO_ERROR;
    const icu::UnicodeString normalized = norm.normalize(src, status);
    if (U_FAILURE(status)) {
        throw DataError(std::string("NFKC normalization failed: ") + u_errorName(status));
    }
    normalized.toUTF8String(out);
    return out;
}

} // namespace emoidx
