#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "ratecast/bits.hpp"
#include "ratecast/cell_config.hpp"

namespace ratecast {

// One subframe's control region: n_cce elements of 72 bits, one byte per
// bit. Elements nobody transmits on read back as uniform random bits.
struct SubframeGrid {
    std::uint64_t subframe = 0;
    unsigned n_cce = 0;
    std::vector<std::uint8_t> bits;

    explicit SubframeGrid(unsigned cces = 0) : n_cce(cces), bits(std::size_t(cces) * kCceBits) {}
};

// Fills the whole region with background noise; blocks are written on top.
inline void fill_background(SubframeGrid& g, std::mt19937_64& rng) {
    std::size_t i = 0;
    const std::size_t n = g.bits.size();
    while (i + 64 <= n) {
        std::uint64_t w = rng();
        for (unsigned k = 0; k < 64; ++k) g.bits[i + k] = static_cast<std::uint8_t>((w >> k) & 1);
        i += 64;
    }
    if (i < n) {
        std::uint64_t w = rng();
        for (; i < n; ++i, w >>= 1) g.bits[i] = static_cast<std::uint8_t>(w & 1);
    }
}

inline void place_block(SubframeGrid& g, unsigned cce_start, const Bits& coded) {
    const std::size_t off = std::size_t(cce_start) * kCceBits;
    if (off + coded.size() > g.bits.size()) throw std::invalid_argument("place_block: out of range");
    for (std::size_t j = 0; j < coded.size(); ++j) g.bits[off + j] = coded[j];
}

// Flips each bit of [cce_start, cce_start + agg) CCEs with probability p,
// sampled by geometric skips so clean spans cost nothing.
inline void apply_channel_noise(SubframeGrid& g, unsigned cce_start, unsigned agg, double p,
                                std::mt19937_64& rng) {
    if (p <= 0.0) return;
    const std::size_t off = std::size_t(cce_start) * kCceBits;
    const std::size_t len = std::size_t(agg) * kCceBits;
    const double denom = std::log1p(-p);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::size_t j = 0;
    while (true) {
        const double u = uni(rng);
        j += static_cast<std::size_t>(std::log(1.0 - u) / denom);
        if (j >= len) return;
        g.bits[off + j] ^= 1;
        ++j;
    }
}

}  // namespace ratecast
