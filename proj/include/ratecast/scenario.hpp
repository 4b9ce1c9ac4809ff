#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

#include "ratecast/cell_sim.hpp"
#include "ratecast/traffic.hpp"

namespace ratecast {

// Declarative description of one capture run.
struct ScenarioConfig {
    std::string name = "scenario";
    unsigned duration_s = 60;
    std::string arrangement = "distributed";  // near | far | distributed
    std::string traffic = "high";             // high | low | mixed
    unsigned n_stg = 8;
    std::string dut_placement = "near";  // near | intermediate | far
    double p_noise = 0.0;
    std::uint64_t seed = 1;
};

inline void validate(const ScenarioConfig& s) {
    if (s.name.empty()) throw std::invalid_argument("scenario: empty name");
    if (s.duration_s < 1) throw std::invalid_argument("scenario: duration_s must be positive");
    if (s.n_stg > 64) throw std::invalid_argument("scenario: n_stg above 64");
    if (s.arrangement != "near" && s.arrangement != "far" && s.arrangement != "distributed") {
        throw std::invalid_argument("scenario: bad arrangement " + s.arrangement);
    }
    traffic_from_name(s.traffic);
    placement_from_name(s.dut_placement);
    if (s.p_noise < 0.0 || s.p_noise >= 0.5) {
        throw std::invalid_argument("scenario: p_noise outside [0, 0.5)");
    }
}

inline Placement stg_placement(const std::string& arrangement, unsigned i) {
    if (arrangement == "near") return Placement::Near;
    if (arrangement == "far") return Placement::Far;
    static constexpr Placement kCycle[3] = {Placement::Near, Placement::Intermediate,
                                            Placement::Far};
    return kCycle[i % 3];
}

inline DciFormat stg_dl_format(unsigned i) {
    static constexpr DciFormat kCycle[5] = {DciFormat::F1, DciFormat::F1A, DciFormat::F2,
                                            DciFormat::F2A, DciFormat::F1C};
    return kCycle[i % 5];
}

// Expands a scenario into a concrete cell setup. RNTIs are drawn without
// replacement from the assignable range, DUT first, so the population is a
// pure function of the seed.
inline SimConfig make_sim_config(const ScenarioConfig& s) {
    validate(s);
    SimConfig cfg;
    cfg.traffic = traffic_from_name(s.traffic);
    cfg.dut_placement = placement_from_name(s.dut_placement);
    cfg.p_noise = s.p_noise;
    cfg.seed = s.seed;

    std::mt19937_64 rng(s.seed);
    std::uniform_int_distribution<int> pick(1, 65523);
    std::set<std::uint16_t> used;
    auto draw = [&] {
        while (true) {
            const std::uint16_t r = static_cast<std::uint16_t>(pick(rng));
            if (used.insert(r).second) return r;
        }
    };
    cfg.dut_rnti = draw();
    for (unsigned i = 0; i < s.n_stg; ++i) {
        UeSpec u;
        u.rnti = draw();
        u.placement = stg_placement(s.arrangement, i);
        u.dl_format = stg_dl_format(i);
        cfg.stgs.push_back(u);
    }
    return cfg;
}

}  // namespace ratecast
