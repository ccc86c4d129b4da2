#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "hwforge/error.hpp"

namespace hwforge {

// Decodes UTF-8 into Unicode scalar values. Rejects overlong forms,
// surrogates, and values above U+10FFFF.
inline std::vector<char32_t> utf8_decode(std::string_view text) {
    std::vector<char32_t> out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const auto b0 = static_cast<unsigned char>(text[i]);
        char32_t cp = 0;
        std::size_t len = 0;
        if (b0 < 0x80) {
            cp = b0;
            len = 1;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            len = 2;
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            len = 3;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            len = 4;
        } else {
            throw DataError(Errc::utf8_error, "invalid UTF-8 lead byte");
        }
        if (i + len > text.size())
            throw DataError(Errc::utf8_error, "truncated UTF-8 sequence");
        for (std::size_t k = 1; k < len; ++k) {
            const auto b = static_cast<unsigned char>(text[i + k]);
            if ((b & 0xC0) != 0x80)
                throw DataError(Errc::utf8_error, "invalid UTF-8 continuation byte");
            cp = (cp << 6) | (b & 0x3F);
        }
        static constexpr char32_t kMinForLen[5] = {0, 0, 0x80, 0x800, 0x10000};
        if (len > 1 && cp < kMinForLen[len])
            throw DataError(Errc::utf8_error, "overlong UTF-8 encoding");
        if (cp >= 0xD800 && cp <= 0xDFFF)
            throw DataError(Errc::utf8_error, "UTF-8 encoded surrogate");
        if (cp > 0x10FFFF)
            throw DataError(Errc::utf8_error, "code point above U+10FFFF");
        out.push_back(cp);
        i += len;
    }
    return out;
}

inline bool utf8_valid(std::string_view text) {
    try {
        utf8_decode(text);
        return true;
    } catch (const DataError&) {
        return false;
    }
}

} // namespace hwforge
