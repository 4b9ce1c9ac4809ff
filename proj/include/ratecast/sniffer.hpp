#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "ratecast/cell_config.hpp"
#include "ratecast/convolutional.hpp"
#include "ratecast/dci_codec.hpp"
#include "ratecast/histogram.hpp"
#include "ratecast/pdcch_grid.hpp"
#include "ratecast/search_space.hpp"
#include "ratecast/tbs.hpp"

namespace ratecast {

// One accepted control message. effective_subframe is where the granted
// transport block actually moves data: uplink grants act four subframes
// after the control message, downlink assignments in the same one.
struct DecodedDci {
    std::uint64_t subframe = 0;
    std::uint64_t effective_subframe = 0;
    Dci dci;
    unsigned agg = 0;
    unsigned cce_start = 0;
    std::uint32_t tbs = 0;
};

struct SnifferCounters {
    std::uint64_t decode_attempts = 0;
    std::uint64_t crc_candidates = 0;
    std::uint64_t position_drops = 0;
    std::uint64_t histogram_drops = 0;
    std::uint64_t duplicate_drops = 0;
    std::uint64_t parse_drops = 0;
    std::uint64_t accepted = 0;
};

struct SnifferConfig {
    CellConfig cell;
    unsigned window = 500;
    unsigned threshold = 8;
    // Empty: exhaustive scan of every aligned position. Otherwise only the
    // listed RNTIs' search-space candidates are tried (a conventional
    // single-UE receiver, kept for the workload comparison).
    std::vector<std::uint16_t> track;
};

// Blind PDCCH decoder with a two-step plausibility filter:
//  1. a candidate RNTI must sit in its own search space at the found
//     position, and
//  2. the (RNTI, format) pair must recur at least `threshold` times within
//     `window` subframes before its messages are believed.
// Survivors are field-validated, then de-duplicated per (RNTI, position)
// keeping the largest aggregation level.
class Sniffer {
  public:
    explicit Sniffer(SnifferConfig cfg)
        : cfg_(std::move(cfg)), hist_(cfg_.window, cfg_.threshold) {
        for (unsigned b : kBlockLengths) {
            for (unsigned agg : kAggLevels) {
                decoders_.emplace_back(DecoderSlot{b, agg, ConvDecoder(b, agg)});
            }
        }
    }

    const SnifferCounters& counters() const { return counters_; }
    const RntiHistogram& histogram() const { return hist_; }

    void process(const SubframeGrid& g, std::vector<DecodedDci>& out) {
        hist_.begin_subframe(g.subframe);
        pending_.clear();
        if (cfg_.track.empty()) {
            for (auto& slot : decoders_) {
                for (unsigned pos = 0; pos + slot.agg <= g.n_cce; pos += slot.agg) {
                    attempt(g, slot, pos);
                }
            }
        } else {
            for (std::uint16_t rnti : cfg_.track) {
                const std::uint32_t y = search_hash(rnti, static_cast<unsigned>(g.subframe));
                for (auto& slot : decoders_) {
                    const unsigned m_max = kNumCandidates[agg_index(slot.agg)];
                    for (unsigned m = 0; m < m_max; ++m) {
                        attempt(g, slot, candidate_start(y, m, slot.agg, g.n_cce));
                    }
                }
            }
        }
        finish_subframe(out);
    }

    unsigned n_ue() const { return hist_.n_ue(); }
    unsigned n_ue_dl() const { return hist_.n_ue_dl(); }
    unsigned n_ue_ul() const { return hist_.n_ue_ul(); }

  private:
    struct DecoderSlot {
        unsigned block_len;
        unsigned agg;
        ConvDecoder dec;
    };

    void attempt(const SubframeGrid& g, DecoderSlot& slot, unsigned pos) {
        ++counters_.decode_attempts;
        ++counters_.crc_candidates;
        slot.dec.decode(g.bits.data() + std::size_t(pos) * kCceBits, scratch_);
        const std::uint16_t rnti = recover_rnti(scratch_);
        const DciFormat fmt = format_for_block(scratch_);
        if (!in_search_space(rnti, static_cast<unsigned>(g.subframe), slot.agg, pos, g.n_cce)) {
            ++counters_.position_drops;
            return;
        }
        if (hist_.record(rnti, fmt, g.subframe) < cfg_.threshold) {
            ++counters_.histogram_drops;
            return;
        }
        const auto parsed = parse_block(scratch_, cfg_.cell.n_rb);
        if (!parsed) {
            ++counters_.parse_drops;
            return;
        }
        DecodedDci d;
        d.subframe = g.subframe;
        d.dci = *parsed;
        d.dci.rnti = rnti;
        d.agg = slot.agg;
        d.cce_start = pos;
        d.effective_subframe = g.subframe + (is_uplink(fmt) ? kUplinkDelay : 0);
        d.tbs = compute_tbs(d.dci.mcs, d.dci.n_rbs);
        pending_.push_back(d);
    }

    void finish_subframe(std::vector<DecodedDci>& out) {
        // Keep the largest aggregation level per (rnti, position); a block
        // sent at level L also decodes cleanly at the lower levels that
        // share its starting CCE.
        std::map<std::pair<std::uint16_t, unsigned>, std::size_t> best;
        std::vector<bool> keep(pending_.size(), false);
        for (std::size_t i = 0; i < pending_.size(); ++i) {
            const auto key = std::make_pair(pending_[i].dci.rnti, pending_[i].cce_start);
            const auto it = best.find(key);
            if (it == best.end()) {
                best.emplace(key, i);
                keep[i] = true;
            } else if (pending_[i].agg > pending_[it->second].agg) {
                keep[it->second] = false;
                keep[i] = true;
                it->second = i;
            }
        }
        const std::size_t first = out.size();
        for (std::size_t i = 0; i < pending_.size(); ++i) {
            if (keep[i]) {
                ++counters_.accepted;
                out.push_back(pending_[i]);
            } else {
                ++counters_.duplicate_drops;
            }
        }
        std::sort(out.begin() + first, out.end(), [](const DecodedDci& a, const DecodedDci& b) {
            if (a.cce_start != b.cce_start) return a.cce_start < b.cce_start;
            if (a.agg != b.agg) return a.agg < b.agg;
            return a.dci.rnti < b.dci.rnti;
        });
    }

    SnifferConfig cfg_;
    RntiHistogram hist_;
    SnifferCounters counters_;
    std::vector<DecoderSlot> decoders_;
    std::vector<DecodedDci> pending_;
    Bits scratch_;
};

}  // namespace ratecast
