#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ratecast/cell_sim.hpp"
#include "ratecast/sniffer.hpp"

namespace ratecast {

// Sniffer-side cell census, sampled once per subframe.
struct NUeSample {
    std::uint64_t subframe = 0;
    unsigned n_ue = 0;
    unsigned n_ue_dl = 0;
    unsigned n_ue_ul = 0;
};

inline constexpr unsigned kFeatureCount = 19;

// Column order of the model input, frozen across the file formats.
inline const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> kNames = {
        "direction",    "dl_rb_mean",  "dl_rb_std",  "dl_tbs_mean", "dl_tbs_std",
        "dl_mcs_mean",  "dl_mcs_std",  "dl_nue_mean", "dl_nue_std", "ul_rb_mean",
        "ul_rb_std",    "ul_tbs_mean", "ul_tbs_std",  "ul_mcs_mean", "ul_mcs_std",
        "ul_nue_mean",  "ul_nue_std",  "rsrp_dbm",    "rsrq_db"};
    return kNames;
}

struct FeatureRow {
    std::array<double, kFeatureCount> x{};
    double label_rate_bps = 0.0;
};

namespace detail {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

inline MeanStd mean_std(double sum, double sum_sq, double n) {
    if (n <= 0.0) return {};
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    return {mean, std::sqrt(var)};
}

}  // namespace detail

// Aggregates the sniffed control stream into one row per completed
// transfer. The observation window is the full second before the transfer
// request; grants are bucketed by the subframe their data lands in, so
// uplink load is counted where it occupies the carrier. The device's own
// grants are excluded; during the pre-transfer rest it holds none anyway.
inline std::vector<FeatureRow> build_features(const std::vector<DecodedDci>& dcis,
                                              const std::vector<NUeSample>& nue,
                                              const std::vector<DutTransfer>& transfers,
                                              std::uint16_t dut_rnti) {
    std::uint64_t horizon = 0;
    for (const auto& d : dcis) horizon = std::max(horizon, d.effective_subframe + 1);
    for (const auto& s : nue) horizon = std::max(horizon, s.subframe + 1);

    struct Cell {
        std::uint32_t rbs = 0;
        std::uint32_t tbs = 0;
        std::uint32_t mcs_sum = 0;
        std::uint32_t mcs_sq = 0;
        std::uint16_t count = 0;
        std::uint16_t n_ue = 0;
    };
    std::vector<Cell> dl(horizon), ul(horizon);

    for (const auto& d : dcis) {
        if (d.dci.rnti == dut_rnti) continue;
        auto& c = (is_uplink(d.dci.format) ? ul : dl)[d.effective_subframe];
        c.rbs += d.dci.n_rbs;
        c.tbs += d.tbs;
        c.mcs_sum += d.dci.mcs;
        c.mcs_sq += d.dci.mcs * d.dci.mcs;
        c.count += 1;
    }
    for (const auto& s : nue) {
        dl[s.subframe].n_ue = static_cast<std::uint16_t>(s.n_ue_dl);
        ul[s.subframe].n_ue = static_cast<std::uint16_t>(s.n_ue_ul);
    }

    std::vector<FeatureRow> rows;
    for (const auto& tr : transfers) {
        if (tr.start_ms < 1000 || tr.start_ms > horizon) continue;
        FeatureRow row;
        row.label_rate_bps = tr.rate_bps;
        row.x[0] = tr.uplink ? 1.0 : 0.0;
        for (unsigned dir = 0; dir < 2; ++dir) {
            const auto& lane = dir ? ul : dl;
            double rb = 0, rb2 = 0, tb = 0, tb2 = 0, nu = 0, nu2 = 0;
            double mc = 0, mc2 = 0, mcount = 0;
            for (std::uint64_t t = tr.start_ms - 1000; t < tr.start_ms; ++t) {
                const auto& c = lane[t];
                rb += c.rbs;
                rb2 += double(c.rbs) * c.rbs;
                tb += c.tbs;
                tb2 += double(c.tbs) * c.tbs;
                nu += c.n_ue;
                nu2 += double(c.n_ue) * c.n_ue;
                mc += c.mcs_sum;
                mc2 += c.mcs_sq;
                mcount += c.count;
            }
            const auto rbs = detail::mean_std(rb, rb2, 1000.0);
            const auto tbs = detail::mean_std(tb, tb2, 1000.0);
            const auto nues = detail::mean_std(nu, nu2, 1000.0);
            const auto mcss = detail::mean_std(mc, mc2, mcount);
            const unsigned base = 1 + dir * 8;
            row.x[base + 0] = rbs.mean;
            row.x[base + 1] = rbs.std;
            row.x[base + 2] = tbs.mean;
            row.x[base + 3] = tbs.std;
            row.x[base + 4] = mcss.mean;
            row.x[base + 5] = mcss.std;
            row.x[base + 6] = nues.mean;
            row.x[base + 7] = nues.std;
        }
        row.x[17] = tr.rsrp_dbm;
        row.x[18] = tr.rsrq_db;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace ratecast
