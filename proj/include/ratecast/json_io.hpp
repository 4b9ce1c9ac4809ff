#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ratecast/mlp.hpp"
#include "ratecast/predictor.hpp"
#include "ratecast/scenario.hpp"

namespace ratecast {

using Json = nlohmann::ordered_json;

inline Json scenario_to_json(const ScenarioConfig& s) {
    Json j;
    j["name"] = s.name;
    j["duration_s"] = s.duration_s;
    j["arrangement"] = s.arrangement;
    j["traffic"] = s.traffic;
    j["n_stg"] = s.n_stg;
    j["dut_placement"] = s.dut_placement;
    j["p_noise"] = s.p_noise;
    j["seed"] = s.seed;
    return j;
}

inline ScenarioConfig scenario_from_json(const Json& j) {
    ScenarioConfig s;
    s.name = j.at("name").get<std::string>();
    s.duration_s = j.at("duration_s").get<unsigned>();
    s.arrangement = j.at("arrangement").get<std::string>();
    s.traffic = j.at("traffic").get<std::string>();
    s.n_stg = j.at("n_stg").get<unsigned>();
    s.dut_placement = j.at("dut_placement").get<std::string>();
    s.p_noise = j.at("p_noise").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    validate(s);
    return s;
}

inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario " + path);
    Json j;
    in >> j;
    return scenario_from_json(j);
}

// Trained predictor: network shape, optimizer settings, normalization, and
// the flat parameter vector.
inline Json model_to_json(const Predictor& p) {
    const MlpConfig& cfg = p.mlp().config();
    Json j;
    j["layers"] = cfg.layers;
    j["learning_rate"] = cfg.learning_rate;
    j["momentum"] = cfg.momentum;
    j["epochs"] = cfg.epochs;
    j["seed"] = cfg.seed;
    j["label_scale"] = p.mlp().label_scale();
    j["norm_mean"] = p.normalizer().mean;
    j["norm_std"] = p.normalizer().std_dev;
    j["params"] = p.mlp().params();
    return j;
}

inline Predictor model_from_json(const Json& j) {
    MlpConfig cfg;
    cfg.layers = j.at("layers").get<std::vector<unsigned>>();
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.momentum = j.at("momentum").get<double>();
    cfg.epochs = j.at("epochs").get<unsigned>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    Predictor p(cfg);
    p.mlp().set_label_scale(j.at("label_scale").get<double>());
    p.normalizer().mean = j.at("norm_mean").get<std::vector<double>>();
    p.normalizer().std_dev = j.at("norm_std").get<std::vector<double>>();
    auto params = j.at("params").get<std::vector<double>>();
    if (params.size() != p.mlp().params().size()) {
        throw std::runtime_error("model: parameter count mismatch");
    }
    p.mlp().params() = std::move(params);
    if (p.normalizer().mean.size() != cfg.layers.front() ||
        p.normalizer().std_dev.size() != cfg.layers.front()) {
        throw std::runtime_error("model: normalizer size mismatch");
    }
    return p;
}

inline Json evaluation_to_json(const Evaluation& ev) {
    Json j;
    j["rmse_bps"] = ev.rmse_bps;
    j["frac_below_1_5_mbps"] = ev.frac_below_1_5_mbps;
    j["ecdf_step_mbps"] = 0.1;
    j["ecdf"] = std::vector<double>(ev.ecdf.begin(), ev.ecdf.end());
    return j;
}

// Published desk measurements of the same two predictors plus a
// round-robin assumption, for side-by-side reading. Informational only.
inline Json reference_rmse_kbps() {
    Json j;
    j["high_load"] = {{"learned", 356}, {"closed_form", 1271}, {"equal_share", 1717}};
    j["low_load"] = {{"learned", 1078}, {"closed_form", 6546}, {"equal_share", 8881}};
    j["mixed"] = {{"learned", 1534}, {"closed_form", 2894}, {"equal_share", 3179}};
    return j;
}

inline void save_json(const std::string& path, const Json& j) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + tmp);
        out << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

inline Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Json j;
    in >> j;
    return j;
}

}  // namespace ratecast
