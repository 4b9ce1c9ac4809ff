#pragma once

#include <cstdint>
#include <vector>

namespace ratecast {

// Bit vectors hold one bit per element, value 0 or 1.
using Bits = std::vector<std::uint8_t>;

// Appends `width` bits of `value`, most significant first.
inline void append_bits(Bits& out, std::uint32_t value, unsigned width) {
    for (unsigned i = width; i-- > 0;) {
        out.push_back(static_cast<std::uint8_t>((value >> i) & 1u));
    }
}

// Reads `width` bits starting at `pos`, most significant first.
inline std::uint32_t read_bits(const Bits& bits, std::size_t pos, unsigned width) {
    std::uint32_t value = 0;
    for (unsigned i = 0; i < width; ++i) {
        value = (value << 1) | bits[pos + i];
    }
    return value;
}

}  // namespace ratecast
