#pragma once

#include <cstdint>
#include <stdexcept>

namespace ratecast {

// MCS 0..28 maps linearly to spectral efficiency (21 + 27*mcs)/140 bits per
// resource element; one resource block carries 126 data-usable resource
// elements per subframe. The product is computed exactly in integers and
// rounded down to a whole number of bytes.
inline constexpr unsigned kMaxMcs = 28;

inline std::uint32_t compute_tbs(unsigned mcs, unsigned n_rbs) {
    if (mcs > kMaxMcs) throw std::invalid_argument("compute_tbs: mcs out of range");
    const std::uint32_t raw = n_rbs * 9u * (21u + 27u * mcs) / 10u;
    return raw & ~7u;
}

}  // namespace ratecast
