#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace ratecast {

enum class DciFormat : std::uint8_t { F0, F1, F1A, F1C, F2, F2A };

inline constexpr DciFormat kAllFormats[] = {DciFormat::F0,  DciFormat::F1, DciFormat::F1A,
                                            DciFormat::F1C, DciFormat::F2, DciFormat::F2A};

inline bool is_uplink(DciFormat f) { return f == DciFormat::F0; }

inline const char* format_name(DciFormat f) {
    switch (f) {
        case DciFormat::F0: return "F0";
        case DciFormat::F1: return "F1";
        case DciFormat::F1A: return "F1A";
        case DciFormat::F1C: return "F1C";
        case DciFormat::F2: return "F2";
        case DciFormat::F2A: return "F2A";
    }
    return "?";
}

inline std::optional<DciFormat> format_from_name(const std::string& s) {
    for (DciFormat f : kAllFormats) {
        if (s == format_name(f)) return f;
    }
    return std::nullopt;
}

// One decoded downlink control message. Resource allocation is a contiguous
// block [start_rb, start_rb + n_rbs); uplink grants (format 0) refer to the
// uplink carrier.
struct Dci {
    DciFormat format = DciFormat::F1A;
    std::uint16_t rnti = 0;
    unsigned start_rb = 0;
    unsigned n_rbs = 1;
    unsigned mcs = 0;
    unsigned seq = 0;
};

// Resource indication value for contiguous type-2 allocations over n RBs.
// Bijection between valid (start, len) pairs and [0, n*(n+1)/2).
inline std::uint32_t riv_encode(unsigned n, unsigned start, unsigned len) {
    if (len < 1 || start + len > n) throw std::invalid_argument("riv_encode: bad allocation");
    if (len - 1 <= n / 2) return n * (len - 1) + start;
    return n * (n - len + 1) + (n - 1 - start);
}

inline bool riv_decode(std::uint32_t riv, unsigned n, unsigned& start, unsigned& len) {
    if (riv >= n * (n + 1) / 2) return false;
    unsigned l = riv / n + 1;
    unsigned s = riv % n;
    if (s + l > n) {
        l = n - l + 2;
        s = n - 1 - s;
    }
    start = s;
    len = l;
    return true;
}

}  // namespace ratecast
