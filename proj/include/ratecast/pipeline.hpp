#pragma once

#include <cstdint>
#include <vector>

#include "ratecast/cell_sim.hpp"
#include "ratecast/features.hpp"
#include "ratecast/predictor.hpp"
#include "ratecast/scenario.hpp"
#include "ratecast/sniffer.hpp"

namespace ratecast {

// Everything one capture run produces, grids already consumed.
struct CaptureResult {
    std::vector<DecodedDci> dcis;
    std::vector<NUeSample> nue;
    std::vector<DutTransfer> transfers;
    std::vector<TruthRecord> truth;
    std::uint16_t dut_rnti = 0;
    SnifferCounters counters;
};

// Simulates a scenario and sniffs every subframe in-process, without
// materialising the grid stream.
inline CaptureResult run_capture(const ScenarioConfig& sc, bool keep_truth = false) {
    const SimConfig sim_cfg = make_sim_config(sc);
    CellSim sim(sim_cfg);
    SnifferConfig sn_cfg;
    sn_cfg.cell = sim_cfg.cell;
    Sniffer sniffer(sn_cfg);

    CaptureResult res;
    res.dut_rnti = sim_cfg.dut_rnti;
    const std::uint64_t total = std::uint64_t(sc.duration_s) * 1000;
    std::vector<DecodedDci> out;
    for (std::uint64_t t = 0; t < total; ++t) {
        const SubframeGrid& g = sim.step();
        if (keep_truth) {
            const auto& tr = sim.subframe_truth();
            res.truth.insert(res.truth.end(), tr.begin(), tr.end());
        }
        out.clear();
        sniffer.process(g, out);
        res.dcis.insert(res.dcis.end(), out.begin(), out.end());
        res.nue.push_back({t, sniffer.n_ue(), sniffer.n_ue_dl(), sniffer.n_ue_ul()});
    }
    res.transfers = sim.transfers();
    res.counters = sniffer.counters();
    return res;
}

// Feature rows for a whole scenario list, concatenated in order.
inline std::vector<FeatureRow> capture_features(const std::vector<ScenarioConfig>& scenarios) {
    std::vector<FeatureRow> rows;
    for (const auto& sc : scenarios) {
        const CaptureResult cap = run_capture(sc);
        const auto part = build_features(cap.dcis, cap.nue, cap.transfers, cap.dut_rnti);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

}  // namespace ratecast
