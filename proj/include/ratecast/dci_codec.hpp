#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "ratecast/bits.hpp"
#include "ratecast/cell_config.hpp"
#include "ratecast/crc16.hpp"
#include "ratecast/dci.hpp"
#include "ratecast/tbs.hpp"

namespace ratecast {

// Field layouts. Every format carries a resource indication value, an MCS
// field, and a rolling sequence counter that the scheduler advances per
// grant. The counter keeps repeated grants from producing identical coded
// blocks: a constant block re-read at a lower aggregation level inside its
// own span is a rotated codeword whose masked CRC yields a stable bogus
// RNTI, and with a counter period well above the histogram window such
// echoes can never accumulate enough hits to be believed.
//
//   F0   flag=0, riv(11), mcs(5), seq(9)            26 bits
//   F1A  flag=1, riv(11), mcs(5), seq(9)            26 bits
//   F1   riv(11), mcs(5), seq(9), zero pad(4)       29 bits
//   F1C  riv'(9), mcs(4), seq(7)                    20 bits
//   F2A  riv(11), mcs(5), seq(9), zero pad(8)       33 bits
//   F2   riv(11), mcs(5), seq(9), zero pad(12)      37 bits
//
// F1C allocates whole resource-block pairs, so its riv' runs over 25 units;
// its shorter counter keeps the block at 36 bits, the most that still
// encodes at aggregation level 1. A 16-bit CRC masked with the target's
// RNTI closes each block.

inline constexpr unsigned kRivBits = 11;
inline constexpr unsigned kPairRivBits = 9;
inline constexpr unsigned kCrcBits = 16;
inline constexpr unsigned kF1cMaxMcs = 15;

inline unsigned seq_bits(DciFormat f) { return f == DciFormat::F1C ? 7 : 9; }

inline unsigned payload_bits(DciFormat f) {
    switch (f) {
        case DciFormat::F0: return 26;
        case DciFormat::F1A: return 26;
        case DciFormat::F1: return 29;
        case DciFormat::F1C: return 20;
        case DciFormat::F2A: return 33;
        case DciFormat::F2: return 37;
    }
    throw std::invalid_argument("payload_bits: bad format");
}

inline unsigned block_bits(DciFormat f) { return payload_bits(f) + kCrcBits; }

// Distinct coded block lengths a blind decoder has to try, ascending.
inline constexpr std::array<unsigned, 5> kBlockLengths = {36, 42, 45, 49, 53};

// Smallest aggregation level whose 72*L block keeps the code rate <= 1/2.
inline unsigned min_agg(DciFormat f) {
    const unsigned b = block_bits(f);
    for (unsigned l : kAggLevels) {
        if (b <= 36u * l) return l;
    }
    throw std::logic_error("min_agg: unreachable");
}

inline Bits pack_dci(const Dci& d, unsigned n_rb) {
    if (d.mcs > kMaxMcs) throw std::invalid_argument("pack_dci: mcs above 28");
    Bits out;
    const unsigned seq = d.seq & ((1u << seq_bits(d.format)) - 1);
    switch (d.format) {
        case DciFormat::F0:
        case DciFormat::F1A:
            append_bits(out, d.format == DciFormat::F1A ? 1 : 0, 1);
            append_bits(out, riv_encode(n_rb, d.start_rb, d.n_rbs), kRivBits);
            append_bits(out, d.mcs, 5);
            append_bits(out, seq, 9);
            break;
        case DciFormat::F1:
        case DciFormat::F2:
        case DciFormat::F2A: {
            append_bits(out, riv_encode(n_rb, d.start_rb, d.n_rbs), kRivBits);
            append_bits(out, d.mcs, 5);
            append_bits(out, seq, 9);
            const unsigned pad =
                d.format == DciFormat::F1 ? 4 : (d.format == DciFormat::F2A ? 8 : 12);
            append_bits(out, 0, pad);
            break;
        }
        case DciFormat::F1C: {
            if (d.start_rb % 2 || d.n_rbs % 2 || d.n_rbs == 0) {
                throw std::invalid_argument("pack_dci: F1C allocates whole pairs");
            }
            if (d.mcs > kF1cMaxMcs) throw std::invalid_argument("pack_dci: F1C mcs above 15");
            append_bits(out, riv_encode(n_rb / 2, d.start_rb / 2, d.n_rbs / 2), kPairRivBits);
            append_bits(out, d.mcs, 4);
            append_bits(out, seq, 7);
            break;
        }
    }
    return out;
}

// Payload followed by CRC xor RNTI.
inline Bits build_block(const Dci& d, unsigned n_rb) {
    Bits out = pack_dci(d, n_rb);
    const std::uint16_t masked = crc16(out) ^ d.rnti;
    append_bits(out, masked, kCrcBits);
    return out;
}

// The CRC mask returns whatever RNTI would make this block self-consistent.
// For a genuine block that is the addressed RNTI; for noise it is uniform.
inline std::uint16_t recover_rnti(const Bits& block) {
    const std::size_t n = block.size();
    const std::uint16_t trailer = static_cast<std::uint16_t>(read_bits(block, n - kCrcBits, kCrcBits));
    return static_cast<std::uint16_t>(crc16(block, 0, n - kCrcBits) ^ trailer);
}

// Formats sharing a block length are told apart by the leading flag bit.
inline DciFormat format_for_block(const Bits& block) {
    switch (block.size()) {
        case 36: return DciFormat::F1C;
        case 42: return block[0] ? DciFormat::F1A : DciFormat::F0;
        case 45: return DciFormat::F1;
        case 49: return DciFormat::F2A;
        case 53: return DciFormat::F2;
    }
    throw std::invalid_argument("format_for_block: bad length");
}

// Strict field validation; the RNTI is left for the caller to fill in.
inline std::optional<Dci> parse_block(const Bits& block, unsigned n_rb) {
    Dci d;
    d.format = format_for_block(block);
    std::size_t pos = d.format == DciFormat::F0 || d.format == DciFormat::F1A ? 1 : 0;
    unsigned start = 0, len = 0;
    if (d.format == DciFormat::F1C) {
        const std::uint32_t riv = read_bits(block, pos, kPairRivBits);
        if (!riv_decode(riv, n_rb / 2, start, len)) return std::nullopt;
        d.start_rb = start * 2;
        d.n_rbs = len * 2;
        d.mcs = read_bits(block, pos + kPairRivBits, 4);
        d.seq = read_bits(block, pos + kPairRivBits + 4, 7);
        return d;
    }
    const std::uint32_t riv = read_bits(block, pos, kRivBits);
    if (!riv_decode(riv, n_rb, start, len)) return std::nullopt;
    d.start_rb = start;
    d.n_rbs = len;
    d.mcs = read_bits(block, pos + kRivBits, 5);
    if (d.mcs > kMaxMcs) return std::nullopt;
    d.seq = read_bits(block, pos + kRivBits + 5, 9);
    const std::size_t pad_from = pos + kRivBits + 5 + 9;
    for (std::size_t i = pad_from; i + kCrcBits < block.size(); ++i) {
        if (block[i]) return std::nullopt;
    }
    return d;
}

}  // namespace ratecast
