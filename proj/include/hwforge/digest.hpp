#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace hwforge {

// FNV-1a, 64-bit. Used for the config and catalog digests recorded in
// manifest headers; not cryptographic.
struct Fnv1a64 {
    std::uint64_t state = 0xCBF29CE484222325ull;

    void update(std::string_view bytes) {
        for (unsigned char c : bytes) {
            state ^= c;
            state *= 0x100000001B3ull;
        }
    }

    void update_u64(std::uint64_t v) {
        char buf[8];
        for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
        update(std::string_view(buf, 8));
    }

    std::uint64_t value() const { return state; }
};

inline std::string to_hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

} // namespace hwforge
