#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "ratecast/pdcch_grid.hpp"

namespace ratecast {

// Binary grid stream, one record per subframe:
//   u64 LE subframe index, u16 LE n_cce, ceil(n_cce*72/8) bytes of bits
// packed MSB first (bit k lives in byte k>>3 under mask 0x80 >> (k&7)).

namespace detail {

inline void put_u64le(std::ostream& os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(v >> (8 * i));
    os.write(b, 8);
}

inline void put_u16le(std::ostream& os, std::uint16_t v) {
    char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
    os.write(b, 2);
}

}  // namespace detail

inline void write_grid(std::ostream& os, const SubframeGrid& g) {
    detail::put_u64le(os, g.subframe);
    detail::put_u16le(os, static_cast<std::uint16_t>(g.n_cce));
    const std::size_t nbits = g.bits.size();
    std::vector<char> packed((nbits + 7) / 8, 0);
    for (std::size_t k = 0; k < nbits; ++k) {
        if (g.bits[k]) packed[k >> 3] |= static_cast<char>(0x80 >> (k & 7));
    }
    os.write(packed.data(), static_cast<std::streamsize>(packed.size()));
    if (!os) throw std::runtime_error("write_grid: stream failure");
}

// Returns false on clean end of stream, throws on a truncated record.
inline bool read_grid(std::istream& is, SubframeGrid& g) {
    char hdr[10];
    is.read(hdr, 10);
    if (is.gcount() == 0 && is.eof()) return false;
    if (is.gcount() != 10) throw std::runtime_error("read_grid: truncated header");
    std::uint64_t sf = 0;
    for (int i = 7; i >= 0; --i) sf = (sf << 8) | static_cast<std::uint8_t>(hdr[i]);
    const unsigned n_cce = static_cast<std::uint8_t>(hdr[8]) |
                           (static_cast<unsigned>(static_cast<std::uint8_t>(hdr[9])) << 8);
    g.subframe = sf;
    g.n_cce = n_cce;
    const std::size_t nbits = std::size_t(n_cce) * kCceBits;
    g.bits.assign(nbits, 0);
    std::vector<char> packed((nbits + 7) / 8);
    is.read(packed.data(), static_cast<std::streamsize>(packed.size()));
    if (is.gcount() != static_cast<std::streamsize>(packed.size())) {
        throw std::runtime_error("read_grid: truncated record");
    }
    for (std::size_t k = 0; k < nbits; ++k) {
        g.bits[k] = (packed[k >> 3] & (0x80 >> (k & 7))) ? 1 : 0;
    }
    return true;
}

}  // namespace ratecast
