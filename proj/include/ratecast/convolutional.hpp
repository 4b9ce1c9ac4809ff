#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "ratecast/bits.hpp"

#if defined(__AVX512BW__) && defined(__AVX512VBMI__)
#include <immintrin.h>
#define RATECAST_HAVE_AVX512 1
#endif

namespace ratecast {

// Tail-biting convolutional code, constraint length 7, rate 1/3.
// Generators 133, 171, 165 (octal). The shift register holds the current
// input bit at bit 6 and the oldest bit at bit 0, so each generator's
// octal value reads off the taps MSB first.
inline constexpr std::uint32_t kConvGenerators[3] = {0133, 0171, 0165};

namespace detail {

constexpr std::uint8_t conv_output(std::uint32_t reg) {
    std::uint8_t o = 0;
    for (int i = 0; i < 3; ++i) {
        o |= static_cast<std::uint8_t>((std::popcount(reg & kConvGenerators[i]) & 1) << i);
    }
    return o;
}

constexpr std::array<std::uint8_t, 128> make_output_table() {
    std::array<std::uint8_t, 128> t{};
    for (std::uint32_t reg = 0; reg < 128; ++reg) t[reg] = conv_output(reg);
    return t;
}

inline constexpr std::array<std::uint8_t, 128> kOutputTable = make_output_table();

// Branch costs for all 8 output triples, as one u64 (one byte per triple),
// indexed by the step's hard bits (low 3) and erasure mask (high 3).
constexpr std::array<std::uint64_t, 64> make_cost_table() {
    std::array<std::uint64_t, 64> t{};
    for (std::uint32_t key = 0; key < 64; ++key) {
        const std::uint32_t hard = key & 7, active = key >> 3;
        std::uint64_t packed = 0;
        for (std::uint32_t o = 0; o < 8; ++o) {
            packed |= static_cast<std::uint64_t>(std::popcount((o ^ hard) & active)) << (8 * o);
        }
        t[key] = packed;
    }
    return t;
}

inline constexpr std::array<std::uint64_t, 64> kCostTable = make_cost_table();

}  // namespace detail

// Encodes `payload` with the register preloaded so the final state equals
// the initial one. Output has 3 bits per input bit, streams interleaved.
inline Bits conv_encode(const Bits& payload) {
    const std::size_t b = payload.size();
    if (b < 7) throw std::invalid_argument("conv_encode: payload too short");
    std::uint32_t state = 0;
    for (unsigned j = 0; j < 6; ++j) state |= static_cast<std::uint32_t>(payload[b - 6 + j]) << j;
    Bits out(3 * b);
    for (std::size_t t = 0; t < b; ++t) {
        const std::uint32_t reg = (static_cast<std::uint32_t>(payload[t]) << 6) | state;
        const std::uint8_t o = detail::kOutputTable[reg];
        out[3 * t] = o & 1;
        out[3 * t + 1] = (o >> 1) & 1;
        out[3 * t + 2] = (o >> 2) & 1;
        state = reg >> 1;
    }
    return out;
}

// Maps 3B coded bits onto E output bits: cyclic repetition when E >= 3B,
// evenly spaced puncturing otherwise.
inline Bits rate_match(const Bits& coded, std::size_t e) {
    const std::size_t q = coded.size();
    Bits out(e);
    if (e >= q) {
        std::size_t idx = 0;
        for (std::size_t j = 0; j < e; ++j) {
            out[j] = coded[idx];
            if (++idx == q) idx = 0;
        }
    } else {
        for (std::size_t j = 0; j < e; ++j) out[j] = coded[j * q / e];
    }
    return out;
}

// Full channel encode for one control channel block at aggregation level
// `agg`: precondition payload_bits <= 36 * agg so the punctured rate stays
// at or below 1/2.
inline Bits channel_encode(const Bits& payload, unsigned agg) {
    const std::size_t e = 72u * agg;
    if (payload.size() > 36u * agg) throw std::invalid_argument("channel_encode: rate above 1/2");
    return rate_match(conv_encode(payload), e);
}

// Wrap-around Viterbi decoder for one (payload length, aggregation level)
// combination. Holds the de-rate-match layout and scratch buffers so a
// sniffer can reuse one instance per combination across subframes.
//
// Hard decisions: each mother position takes the majority of its received
// copies; ties and punctured positions count as erasures. Path metrics are
// 8-bit saturating, which only affects paths far from the survivor.
class ConvDecoder {
  public:
    ConvDecoder(std::size_t payload_bits, unsigned agg)
        : b_(payload_bits), e_(72u * agg) {
        if (b_ < 7) throw std::invalid_argument("ConvDecoder: payload too short");
        const std::size_t q = 3 * b_;
        if (e_ >= q) {
            repeat_total_.resize(q);
            for (std::size_t j = 0; j < e_; ++j) repeat_total_[j % q]++;
        } else {
            punct_idx_.resize(e_);
            for (std::size_t j = 0; j < e_; ++j) punct_idx_[j] = static_cast<std::uint16_t>(j * q / e_);
        }
        const std::size_t padded = (q + 63) / 64 * 64 + 64;
        votes_.resize(padded);
        step_key_.resize(b_);
        decisions_.resize(b_);
#ifdef RATECAST_HAVE_AVX512
        cost_vec_.resize(b_);
        n_chunks_ = (q + 63) / 64;
        chunk_mask_.resize(n_chunks_);
        for (std::size_t c = 0; c < n_chunks_; ++c) {
            const std::size_t len = std::min<std::size_t>(64, q - 64 * c);
            chunk_mask_[c] = len == 64 ? ~0ull : ((1ull << len) - 1);
        }
        totals_.resize(padded, 0);
        for (std::size_t i = 0; i < repeat_total_.size(); ++i) totals_[i] = repeat_total_[i];
        hard_bits_.resize(n_chunks_ + 1, 0);
        act_bits_.resize(n_chunks_ + 1, 0);
#endif
    }

    std::size_t payload_bits() const { return b_; }
    std::size_t coded_bits() const { return e_; }

    // rx points at e() received bits, one byte per bit. Returns the decoded
    // payload in `out` (resized to payload_bits). Deterministic for any
    // input, including noise.
    void decode(const std::uint8_t* rx, Bits& out) {
#ifdef RATECAST_HAVE_AVX512
        if (use_simd) {
            build_cost_vec_avx512(rx);
            decode_avx512(out);
            return;
        }
#endif
        build_step_keys(rx);
        decode_scalar(out);
    }

    bool use_simd = default_simd();

    static constexpr bool default_simd() {
#ifdef RATECAST_HAVE_AVX512
        return true;
#else
        return false;
#endif
    }

  private:
    // Per-step key = hard bits | erasure mask << 3, feeding kCostTable.
    void build_step_keys(const std::uint8_t* rx) {
        const std::size_t q = 3 * b_;
        if (!punct_idx_.empty()) {
            std::memset(votes_.data(), 0, q);
            for (std::size_t j = 0; j < e_; ++j) votes_[punct_idx_[j]] = static_cast<std::uint8_t>(2 + rx[j]);
            // votes_: 0 = punctured, 2 = bit 0, 3 = bit 1
            for (std::size_t t = 0; t < b_; ++t) {
                std::uint32_t hard = 0, active = 0;
                for (unsigned i = 0; i < 3; ++i) {
                    const std::uint8_t v = votes_[3 * t + i];
                    active |= static_cast<std::uint32_t>(v >> 1) << i;
                    hard |= static_cast<std::uint32_t>(v & 1) << i;
                }
                step_key_[t] = static_cast<std::uint8_t>(hard | (active << 3));
            }
        } else {
            std::memset(votes_.data(), 0, q);
            std::size_t idx = 0;
            for (std::size_t j = 0; j < e_; ++j) {
                votes_[idx] += rx[j];
                if (++idx == q) idx = 0;
            }
            for (std::size_t t = 0; t < b_; ++t) {
                std::uint32_t hard = 0, active = 0;
                for (unsigned i = 0; i < 3; ++i) {
                    const unsigned two_v = 2u * votes_[3 * t + i];
                    const unsigned total = repeat_total_[3 * t + i];
                    if (two_v != total) {
                        active |= 1u << i;
                        hard |= static_cast<std::uint32_t>(two_v > total) << i;
                    }
                }
                step_key_[t] = static_cast<std::uint8_t>(hard | (active << 3));
            }
        }
    }

    static std::uint8_t sat_add(std::uint8_t m, std::uint8_t c) {
        const unsigned s = unsigned(m) + c;
        return static_cast<std::uint8_t>(s > 255 ? 255 : s);
    }

    void trellis_pass_scalar(bool record) {
        std::uint8_t next[64];
        for (std::size_t t = 0; t < b_; ++t) {
            const std::uint64_t cost8 = detail::kCostTable[step_key_[t]];
            const auto cost = [&](std::uint32_t reg) {
                return static_cast<std::uint8_t>(cost8 >> (8 * detail::kOutputTable[reg]));
            };
            std::uint64_t dec = 0;
            for (std::uint32_t i = 0; i < 32; ++i) {
                const std::uint8_t me = metric_[2 * i], mo = metric_[2 * i + 1];
                for (std::uint32_t bbit = 0; bbit < 2; ++bbit) {
                    const std::uint32_t n = (bbit << 5) | i;
                    const std::uint32_t reg = (bbit << 6) | (i << 1);
                    const std::uint8_t m0 = sat_add(me, cost(reg));
                    const std::uint8_t m1 = sat_add(mo, cost(reg | 1));
                    next[n] = m1 < m0 ? m1 : m0;
                    dec |= static_cast<std::uint64_t>(m1 < m0) << n;
                }
            }
            if (record) decisions_[t] = dec;
            std::memcpy(metric_, next, 64);
        }
    }

    void decode_scalar(Bits& out) {
        std::memset(metric_, 0, 64);
        trellis_pass_scalar(false);
        trellis_pass_scalar(true);
        traceback(out);
    }

#ifdef RATECAST_HAVE_AVX512
    // Same hard/erasure decisions as build_step_keys, but the per-position
    // votes accumulate 64 bytes at a time and the majority comparisons land
    // directly in compare masks, so the bit streams come out packed.
    void build_cost_vec_avx512(const std::uint8_t* rx) {
        const std::size_t q = 3 * b_;
        std::memset(votes_.data(), 0, votes_.size());
        if (!punct_idx_.empty()) {
            for (std::size_t j = 0; j < e_; ++j) votes_[punct_idx_[j]] = static_cast<std::uint8_t>(2 + rx[j]);
            for (std::size_t c = 0; c < n_chunks_; ++c) {
                const __m512i v = _mm512_maskz_loadu_epi8(chunk_mask_[c], votes_.data() + 64 * c);
                act_bits_[c] = _mm512_cmpge_epu8_mask(v, _mm512_set1_epi8(2));
                hard_bits_[c] = _mm512_cmpgt_epu8_mask(v, _mm512_set1_epi8(2));
            }
        } else {
            const std::size_t reps = e_ / q, tail = e_ % q;
            for (std::size_t r = 0; r < reps; ++r) {
                const std::uint8_t* src = rx + r * q;
                for (std::size_t c = 0; c < n_chunks_; ++c) {
                    const __m512i acc = _mm512_loadu_si512(votes_.data() + 64 * c);
                    const __m512i s = _mm512_maskz_loadu_epi8(chunk_mask_[c], src + 64 * c);
                    _mm512_storeu_si512(votes_.data() + 64 * c, _mm512_add_epi8(acc, s));
                }
            }
            if (tail) {
                const std::uint8_t* src = rx + reps * q;
                for (std::size_t c = 0; 64 * c < tail; ++c) {
                    const std::size_t len = std::min<std::size_t>(64, tail - 64 * c);
                    const __mmask64 mk = len == 64 ? ~0ull : ((1ull << len) - 1);
                    const __m512i acc = _mm512_loadu_si512(votes_.data() + 64 * c);
                    const __m512i s = _mm512_maskz_loadu_epi8(mk, src + 64 * c);
                    _mm512_storeu_si512(votes_.data() + 64 * c, _mm512_add_epi8(acc, s));
                }
            }
            for (std::size_t c = 0; c < n_chunks_; ++c) {
                const __m512i v = _mm512_loadu_si512(votes_.data() + 64 * c);
                const __m512i vv = _mm512_add_epi8(v, v);
                const __m512i tt = _mm512_loadu_si512(totals_.data() + 64 * c);
                act_bits_[c] = _mm512_mask_cmpneq_epu8_mask(chunk_mask_[c], vv, tt);
                hard_bits_[c] = _mm512_mask_cmpgt_epu8_mask(chunk_mask_[c], vv, tt);
            }
        }
        for (std::size_t t = 0; t < b_; ++t) {
            const std::size_t idx = 3 * t, w = idx >> 6;
            const unsigned sh = idx & 63;
            const auto pick = [&](const std::vector<std::uint64_t>& bits) {
                const unsigned __int128 pair =
                    (static_cast<unsigned __int128>(bits[w + 1]) << 64) | bits[w];
                return static_cast<std::uint32_t>((pair >> sh) & 7);
            };
            cost_vec_[t] = detail::kCostTable[pick(hard_bits_) | (pick(act_bits_) << 3)];
        }
    }

    void trellis_pass_avx512(bool record) {
        const __m512i idx_e = _mm512_set_epi8(
            62, 60, 58, 56, 54, 52, 50, 48, 46, 44, 42, 40, 38, 36, 34, 32,
            30, 28, 26, 24, 22, 20, 18, 16, 14, 12, 10, 8, 6, 4, 2, 0,
            62, 60, 58, 56, 54, 52, 50, 48, 46, 44, 42, 40, 38, 36, 34, 32,
            30, 28, 26, 24, 22, 20, 18, 16, 14, 12, 10, 8, 6, 4, 2, 0);
        const __m512i idx_o = _mm512_or_si512(idx_e, _mm512_set1_epi8(1));
        // Cost shuffle indexes: lane 32*b + i selects output table entry for
        // register (b << 6) | (i << 1) | pb.
        alignas(64) std::uint8_t i0[64], i1[64];
        for (std::uint32_t n = 0; n < 64; ++n) {
            const std::uint32_t reg = ((n >> 5) << 6) | ((n & 31) << 1);
            i0[n] = detail::kOutputTable[reg];
            i1[n] = detail::kOutputTable[reg | 1];
        }
        const __m512i cidx0 = _mm512_load_si512(i0);
        const __m512i cidx1 = _mm512_load_si512(i1);

        __m512i m = _mm512_loadu_si512(metric_);
        for (std::size_t t = 0; t < b_; ++t) {
            const __m512i c8 = _mm512_set1_epi64(static_cast<long long>(cost_vec_[t]));
            const __m512i ee = _mm512_permutexvar_epi8(idx_e, m);
            const __m512i oo = _mm512_permutexvar_epi8(idx_o, m);
            const __m512i m0 = _mm512_adds_epu8(ee, _mm512_permutexvar_epi8(cidx0, c8));
            const __m512i m1 = _mm512_adds_epu8(oo, _mm512_permutexvar_epi8(cidx1, c8));
            m = _mm512_min_epu8(m0, m1);
            if (record) decisions_[t] = _mm512_cmplt_epu8_mask(m1, m0);
        }
        _mm512_storeu_si512(metric_, m);
    }

    void decode_avx512(Bits& out) {
        std::memset(metric_, 0, 64);
        trellis_pass_avx512(false);
        trellis_pass_avx512(true);
        traceback(out);
    }
#endif

    void traceback(Bits& out) {
        std::uint32_t best = 0;
        for (std::uint32_t s = 1; s < 64; ++s) {
            if (metric_[s] < metric_[best]) best = s;
        }
        out.resize(b_);
        std::uint32_t s = best;
        for (std::size_t t = b_; t-- > 0;) {
            out[t] = static_cast<std::uint8_t>(s >> 5);
            s = ((s & 31) << 1) | ((decisions_[t] >> s) & 1);
        }
    }

    std::size_t b_, e_;
    std::vector<std::uint8_t> repeat_total_;
    std::vector<std::uint16_t> punct_idx_;
    std::vector<std::uint8_t> votes_;
    std::vector<std::uint8_t> step_key_;
    std::vector<std::uint64_t> decisions_;
#ifdef RATECAST_HAVE_AVX512
    std::vector<std::uint64_t> cost_vec_;
    std::size_t n_chunks_ = 0;
    std::vector<std::uint64_t> chunk_mask_;
    std::vector<std::uint8_t> totals_;
    std::vector<std::uint64_t> hard_bits_;
    std::vector<std::uint64_t> act_bits_;
#endif
    alignas(64) std::uint8_t metric_[64];
};

// One-shot decode helper for tests and tools.
inline Bits channel_decode(const Bits& rx, std::size_t payload_bits, unsigned agg) {
    if (rx.size() != 72u * agg) throw std::invalid_argument("channel_decode: bad block size");
    ConvDecoder dec(payload_bits, agg);
    Bits out;
    dec.decode(rx.data(), out);
    return out;
}

}  // namespace ratecast
