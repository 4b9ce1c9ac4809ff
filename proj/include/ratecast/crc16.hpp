#pragma once

#include <cstdint>

#include "ratecast/bits.hpp"

namespace ratecast {

// CRC-16/CCITT over a bit sequence: polynomial 0x1021, initial value 0,
// no final inversion, bits consumed most significant first.
inline std::uint16_t crc16(const Bits& bits, std::size_t pos, std::size_t count) {
    std::uint32_t reg = 0;
    for (std::size_t i = 0; i < count; ++i) {
        reg ^= static_cast<std::uint32_t>(bits[pos + i]) << 15;
        reg <<= 1;
        if (reg & 0x10000u) reg ^= 0x1021u;
    }
    return static_cast<std::uint16_t>(reg & 0xFFFFu);
}

inline std::uint16_t crc16(const Bits& bits) { return crc16(bits, 0, bits.size()); }

}  // namespace ratecast
