#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ratecast/cell_config.hpp"

namespace ratecast {

// UE-specific search spaces. The hash seed walks a multiplicative
// congruence modulo the prime 65537, advanced once per subframe index
// within the radio frame, so candidate positions move every subframe but
// are reproducible from the RNTI alone.

inline constexpr std::uint32_t kHashMultiplier = 39827;
inline constexpr std::uint32_t kHashModulus = 65537;

// Candidate counts per aggregation level 1, 2, 4, 8.
inline constexpr std::array<unsigned, 4> kNumCandidates = {6, 6, 2, 2};

inline std::uint32_t search_hash(std::uint16_t rnti, unsigned subframe) {
    std::uint32_t y = rnti;
    const unsigned steps = subframe % 10 + 1;
    for (unsigned k = 0; k < steps; ++k) y = kHashMultiplier * y % kHashModulus;
    return y;
}

inline unsigned agg_index(unsigned agg) {
    switch (agg) {
        case 1: return 0;
        case 2: return 1;
        case 4: return 2;
        default: return 3;
    }
}

// Starting CCE of candidate m at level `agg`.
inline unsigned candidate_start(std::uint32_t hash, unsigned m, unsigned agg, unsigned n_cce) {
    const unsigned slots = n_cce / agg;
    return agg * ((hash + m) % slots);
}

// All candidate starts for one RNTI in one subframe, at one level.
inline std::vector<unsigned> candidate_starts(std::uint16_t rnti, unsigned subframe, unsigned agg,
                                              unsigned n_cce) {
    const std::uint32_t y = search_hash(rnti, subframe);
    std::vector<unsigned> out;
    const unsigned m_max = kNumCandidates[agg_index(agg)];
    out.reserve(m_max);
    for (unsigned m = 0; m < m_max; ++m) out.push_back(candidate_start(y, m, agg, n_cce));
    return out;
}

// True when (cce_start, agg) is one of the RNTI's candidates this subframe.
inline bool in_search_space(std::uint16_t rnti, unsigned subframe, unsigned agg, unsigned cce_start,
                            unsigned n_cce) {
    const std::uint32_t y = search_hash(rnti, subframe);
    const unsigned m_max = kNumCandidates[agg_index(agg)];
    for (unsigned m = 0; m < m_max; ++m) {
        if (candidate_start(y, m, agg, n_cce) == cce_start) return true;
    }
    return false;
}

}  // namespace ratecast
