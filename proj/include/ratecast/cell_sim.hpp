#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "ratecast/cell_config.hpp"
#include "ratecast/convolutional.hpp"
#include "ratecast/dci.hpp"
#include "ratecast/dci_codec.hpp"
#include "ratecast/pdcch_grid.hpp"
#include "ratecast/search_space.hpp"
#include "ratecast/tbs.hpp"
#include "ratecast/traffic.hpp"

namespace ratecast {

struct UeSpec {
    std::uint16_t rnti = 0;
    Placement placement = Placement::Near;
    DciFormat dl_format = DciFormat::F1A;
    bool has_ul = true;
};

struct SimConfig {
    CellConfig cell;
    std::vector<UeSpec> stgs;
    TrafficModel traffic = TrafficModel::High;
    bool stg_churn = true;
    bool dut_enabled = true;
    std::uint16_t dut_rnti = 0;
    Placement dut_placement = Placement::Near;
    double p_noise = 0.0;
    std::uint64_t seed = 1;
};

// One scheduled grant, as ground truth for the sniffer output.
struct TruthRecord {
    std::uint64_t subframe = 0;
    std::uint64_t effective_subframe = 0;
    std::uint16_t rnti = 0;
    DciFormat format = DciFormat::F1A;
    unsigned start_rb = 0;
    unsigned n_rbs = 0;
    unsigned mcs = 0;
    std::uint32_t tbs = 0;
    unsigned agg = 0;
    unsigned cce_start = 0;
};

struct DutTransfer {
    std::uint64_t start_ms = 0;
    std::uint64_t end_ms = 0;
    bool uplink = false;
    std::uint64_t bytes = 0;
    double rate_bps = 0.0;
    double rsrp_dbm = 0.0;
    double rsrq_db = 0.0;
};

// Event-free cell model stepped one subframe at a time. Each step schedules
// both directions over 50 resource blocks, emits the matching control
// blocks into a fresh noise-filled PDCCH grid, and advances the traffic
// models. The device under test runs an alternating up/down file-transfer
// loop; its completion times define the labels everything else predicts.
class CellSim {
  public:
    static constexpr std::uint64_t kTransferBytes = 1'000'000;
    static constexpr std::uint64_t kRestMs = 10'000;
    static constexpr std::uint64_t kFirstRequestMs = 2'000;
    static constexpr unsigned kCongestionThreshold = 6;
    static constexpr unsigned kCongestionPenalty = 2;
    static constexpr double kAttachProb = 0.02;
    static constexpr double kDetachProb = 0.05;

    explicit CellSim(SimConfig cfg)
        : cfg_(std::move(cfg)),
          rng_(cfg_.seed ^ 0xD1B54A32D192ED03ull),
          grid_(cfg_.cell.n_cce),
          cce_used_(cfg_.cell.n_cce, 0) {
        std::vector<std::uint16_t> all;
        for (const auto& s : cfg_.stgs) all.push_back(s.rnti);
        if (cfg_.dut_enabled) all.push_back(cfg_.dut_rnti);
        for (std::uint16_t r : all) {
            if (r < 1 || r > 65523) throw std::invalid_argument("CellSim: rnti out of range");
        }
        std::sort(all.begin(), all.end());
        if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
            throw std::invalid_argument("CellSim: duplicate rnti");
        }
        ues_.resize(cfg_.stgs.size());
        if (cfg_.traffic == TrafficModel::Mixed) {
            std::uniform_int_distribution<std::uint64_t> first(0, 29'999);
            for (auto& u : ues_) u.next_burst_ms = first(rng_);
        }
        dl_ring_.fill(0);
    }

    // Advances one subframe and returns the emitted control region.
    const SubframeGrid& step() {
        const std::uint64_t t = now_;
        truth_.clear();
        pending_.clear();

        if (cfg_.stg_churn && t % 1000 == 0) churn();
        accrue_traffic(t);
        if (cfg_.dut_enabled && !dut_active_ && t >= dut_next_request_) start_transfer(t);

        const unsigned active = count_active();
        last_active_ = active;
        const bool congested = active >= kCongestionThreshold;

        std::fill(cce_used_.begin(), cce_used_.end(), 0);
        unsigned dl_rbs = 0;
        schedule_direction(false, congested, t, dl_rbs);
        unsigned ul_rbs = 0;
        schedule_direction(true, congested, t, ul_rbs);

        grid_.subframe = t;
        fill_background(grid_, rng_);
        for (const auto& pb : pending_) {
            place_block(grid_, pb.cce_start, pb.coded);
            apply_channel_noise(grid_, pb.cce_start, pb.agg, cfg_.p_noise, rng_);
        }

        load_sum_ -= dl_ring_[t % dl_ring_.size()];
        dl_ring_[t % dl_ring_.size()] = dl_rbs;
        load_sum_ += dl_rbs;

        ++now_;
        return grid_;
    }

    const std::vector<TruthRecord>& subframe_truth() const { return truth_; }
    const std::vector<DutTransfer>& transfers() const { return transfers_; }
    std::uint64_t now_ms() const { return now_; }
    std::uint16_t dut_rnti() const { return cfg_.dut_rnti; }
    bool dut_transferring() const { return dut_active_; }
    unsigned last_active_ues() const { return last_active_; }
    bool stg_attached(std::size_t i) const { return ues_.at(i).attached; }

    unsigned attached_stgs() const {
        unsigned n = 0;
        for (const auto& u : ues_) n += u.attached ? 1 : 0;
        return n;
    }

    // Trailing one-second downlink resource-block utilisation.
    double dl_load_fraction() const {
        return double(load_sum_) / (double(dl_ring_.size()) * cfg_.cell.n_rb);
    }

  private:
    struct UeState {
        bool attached = true;
        double backlog_dl = 0.0;
        double backlog_ul = 0.0;
        std::uint32_t seq_dl = 0;
        std::uint32_t seq_ul = 0;
        std::uint64_t next_burst_ms = 0;
        std::uint64_t burst_end_ms = 0;
        double burst_dl_per_ms = 0.0;
        double burst_ul_per_ms = 0.0;
    };

    struct PendingBlock {
        unsigned cce_start = 0;
        unsigned agg = 0;
        Bits coded;
    };

    void churn() {
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (auto& u : ues_) {
            const double draw = uni(rng_);
            if (u.attached) {
                if (draw < kDetachProb) {
                    u.attached = false;
                    u.backlog_dl = u.backlog_ul = 0.0;
                    u.burst_end_ms = 0;
                    u.burst_dl_per_ms = u.burst_ul_per_ms = 0.0;
                }
            } else if (draw < kAttachProb) {
                u.attached = true;
            }
        }
    }

    void accrue_traffic(std::uint64_t t) {
        if (cfg_.traffic == TrafficModel::High) return;
        for (std::size_t i = 0; i < ues_.size(); ++i) {
            auto& u = ues_[i];
            if (!u.attached) continue;
            if (cfg_.traffic == TrafficModel::Low) {
                u.backlog_dl += 64.0;
                if (cfg_.stgs[i].has_ul) u.backlog_ul += 16.0;
                continue;
            }
            if (t >= u.next_burst_ms) start_burst(u, cfg_.stgs[i].has_ul, t);
            if (t < u.burst_end_ms) {
                u.backlog_dl += u.burst_dl_per_ms;
                u.backlog_ul += u.burst_ul_per_ms;
            }
        }
    }

    void start_burst(UeState& u, bool has_ul, std::uint64_t t) {
        static constexpr std::array<double, 6> kDlMbps = {0.064, 0.5, 1.0, 3.0, 5.0, 10.0};
        static constexpr std::array<double, 6> kUlMbps = {0.016, 0.5, 1.0, 2.0, 4.0, 10.0};
        static constexpr std::array<unsigned, 3> kDurS = {5, 10, 25};
        std::uniform_int_distribution<int> rate_pick(0, 5);
        std::uniform_int_distribution<int> dur_pick(0, 2);
        std::uniform_int_distribution<int> coin(0, 1);
        const bool ul = has_ul && coin(rng_) == 1;
        const int r = rate_pick(rng_);
        const int d = dur_pick(rng_);
        u.burst_end_ms = t + kDurS[d] * 1000ull;
        u.burst_dl_per_ms = ul ? 0.0 : kDlMbps[r] * 1000.0;
        u.burst_ul_per_ms = ul ? kUlMbps[r] * 1000.0 : 0.0;
        u.next_burst_ms = t + 30'000;
    }

    void start_transfer(std::uint64_t t) {
        dut_active_ = true;
        dut_remaining_ = kTransferBytes * 8;
        cur_.start_ms = t;
        cur_.uplink = dut_next_ul_;
        cur_.bytes = kTransferBytes;
        cur_.rsrp_dbm = placement_params(cfg_.dut_placement).rsrp_dbm;
        cur_.rsrq_db = rsrq_db(dl_load_fraction(), cfg_.dut_placement);
        dut_next_ul_ = !dut_next_ul_;
    }

    // Attached users with pending demand, plus the transferring DUT.
    unsigned count_active() const {
        unsigned n = 0;
        for (const auto& u : ues_) {
            if (!u.attached) continue;
            if (cfg_.traffic == TrafficModel::High || u.backlog_dl >= 8.0 || u.backlog_ul >= 8.0) ++n;
        }
        if (dut_active_) ++n;
        return n;
    }

    bool stg_demand(std::size_t i, bool uplink) const {
        const auto& u = ues_[i];
        if (!u.attached) return false;
        if (uplink && !cfg_.stgs[i].has_ul) return false;
        if (cfg_.traffic == TrafficModel::High) return true;
        return (uplink ? u.backlog_ul : u.backlog_dl) >= 8.0;
    }

    unsigned needed_rbs(unsigned mcs, double bits) const {
        for (unsigned n = 1; n < cfg_.cell.n_rb; ++n) {
            if (compute_tbs(mcs, n) >= bits) return n;
        }
        return cfg_.cell.n_rb;
    }

    unsigned draw_agg(Placement p, DciFormat fmt) {
        const auto pp = placement_params(p);
        unsigned agg = pp.agg_lo;
        if (pp.agg_hi != pp.agg_lo) {
            std::uniform_int_distribution<int> coin(0, 1);
            agg = coin(rng_) ? pp.agg_hi : pp.agg_lo;
        }
        return std::max(agg, min_agg(fmt));
    }

    // First free candidate in the UE's search space, or -1 when blocked.
    int assign_cce(std::uint16_t rnti, std::uint64_t t, unsigned agg) {
        const std::uint32_t h = search_hash(rnti, unsigned(t));
        const unsigned m_max = kNumCandidates[agg_index(agg)];
        for (unsigned m = 0; m < m_max; ++m) {
            const unsigned pos = candidate_start(h, m, agg, cfg_.cell.n_cce);
            bool free = true;
            for (unsigned k = 0; k < agg; ++k) free = free && !cce_used_[pos + k];
            if (!free) continue;
            for (unsigned k = 0; k < agg; ++k) cce_used_[pos + k] = 1;
            return int(pos);
        }
        return -1;
    }

    // Round-robin with a rotating head. The head of the rotation is served
    // first and under saturation takes the whole carrier; later users get
    // the remainder. A user whose control channel candidates are all taken
    // is skipped for the subframe and keeps its backlog.
    void schedule_direction(bool uplink, bool congested, std::uint64_t t, unsigned& rbs_used) {
        const std::size_t dut_index = ues_.size();
        std::vector<std::size_t> act;
        for (std::size_t i = 0; i < ues_.size(); ++i) {
            if (stg_demand(i, uplink)) act.push_back(i);
        }
        if (dut_active_ && cur_.uplink == uplink && dut_remaining_ > 0) act.push_back(dut_index);
        std::uint64_t& cursor = uplink ? cursor_ul_ : cursor_dl_;
        const std::uint64_t head = cursor++;
        if (act.empty()) return;

        unsigned rb_cursor = 0;
        unsigned granted = 0;
        for (std::size_t k = 0; k < act.size() && rb_cursor < cfg_.cell.n_rb; ++k) {
            const std::size_t i = act[(head + k) % act.size()];
            const bool is_dut = i == dut_index;
            const Placement pl = is_dut ? cfg_.dut_placement : cfg_.stgs[i].placement;
            const std::uint16_t rnti = is_dut ? cfg_.dut_rnti : cfg_.stgs[i].rnti;
            const DciFormat fmt =
                uplink ? DciFormat::F0 : (is_dut ? DciFormat::F1A : cfg_.stgs[i].dl_format);

            unsigned mcs = std::min(placement_params(pl).mcs_cap,
                                    fmt == DciFormat::F1C ? kF1cMaxMcs : kMaxMcs);
            mcs -= std::min(mcs, congested ? kCongestionPenalty : 0u);

            double bits = 1e18;
            if (is_dut) {
                bits = double(dut_remaining_);
            } else if (cfg_.traffic != TrafficModel::High) {
                bits = uplink ? ues_[i].backlog_ul : ues_[i].backlog_dl;
            }

            const unsigned needed = needed_rbs(mcs, bits);
            unsigned start = rb_cursor;
            unsigned n = 0;
            if (fmt == DciFormat::F1C) {
                start = (rb_cursor + 1) & ~1u;
                if (start >= cfg_.cell.n_rb) continue;
                const unsigned avail = (cfg_.cell.n_rb - start) & ~1u;
                n = std::min((needed + 1) & ~1u, avail);
                if (n < 2) continue;
            } else {
                n = std::min(needed, cfg_.cell.n_rb - start);
                if (n < 1) continue;
            }

            const unsigned agg = draw_agg(pl, fmt);
            const int cce = assign_cce(rnti, t, agg);
            if (cce < 0) continue;

            Dci d;
            d.format = fmt;
            d.rnti = rnti;
            d.start_rb = start;
            d.n_rbs = n;
            d.mcs = mcs;
            auto& ue_seq = is_dut ? dut_seq_ : ues_[i].seq_dl;
            auto& ue_seq_ul = is_dut ? dut_seq_ul_ : ues_[i].seq_ul;
            d.seq = uplink ? ue_seq_ul++ : ue_seq++;

            const std::uint32_t tbs = compute_tbs(mcs, n);
            TruthRecord rec;
            rec.subframe = t;
            rec.effective_subframe = t + (uplink ? kUplinkDelay : 0);
            rec.rnti = rnti;
            rec.format = fmt;
            rec.start_rb = start;
            rec.n_rbs = n;
            rec.mcs = mcs;
            rec.tbs = tbs;
            rec.agg = agg;
            rec.cce_start = unsigned(cce);
            truth_.push_back(rec);

            pending_.push_back({unsigned(cce), agg, channel_encode(build_block(d, cfg_.cell.n_rb), agg)});
            rb_cursor = start + n;
            granted += n;

            if (is_dut) {
                const std::uint64_t used = std::min<std::uint64_t>(tbs, dut_remaining_);
                dut_remaining_ -= used;
                if (dut_remaining_ == 0) finish_transfer(rec.effective_subframe);
            } else if (cfg_.traffic != TrafficModel::High) {
                auto& b = uplink ? ues_[i].backlog_ul : ues_[i].backlog_dl;
                b = std::max(0.0, b - double(tbs));
            }
        }
        rbs_used = granted;
    }

    void finish_transfer(std::uint64_t effective_sf) {
        cur_.end_ms = effective_sf + 1;
        cur_.rate_bps = double(kTransferBytes * 8) * 1000.0 / double(cur_.end_ms - cur_.start_ms);
        transfers_.push_back(cur_);
        dut_active_ = false;
        dut_next_request_ = cur_.end_ms + kRestMs;
    }

    SimConfig cfg_;
    std::mt19937_64 rng_;
    SubframeGrid grid_;
    std::vector<std::uint8_t> cce_used_;
    std::vector<UeState> ues_;
    std::vector<TruthRecord> truth_;
    std::vector<PendingBlock> pending_;
    std::vector<DutTransfer> transfers_;

    std::uint64_t now_ = 0;
    std::uint64_t cursor_dl_ = 0;
    std::uint64_t cursor_ul_ = 0;
    unsigned last_active_ = 0;

    bool dut_active_ = false;
    bool dut_next_ul_ = false;
    std::uint64_t dut_remaining_ = 0;
    std::uint64_t dut_next_request_ = kFirstRequestMs;
    std::uint32_t dut_seq_ = 0;
    std::uint32_t dut_seq_ul_ = 0;
    DutTransfer cur_;

    std::array<unsigned, 1000> dl_ring_{};
    std::uint64_t load_sum_ = 0;
};

}  // namespace ratecast
