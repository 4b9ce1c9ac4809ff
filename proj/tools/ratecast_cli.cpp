// Command line front end. Every verb reads and writes plain files so the
// stages can be chained, inspected, or replaced one at a time:
//
//   simulate -> grid.bin + transfers.csv      (air interface capture)
//   sniff    -> dcis.csv + nue.csv            (blind decode)
//   features -> features.csv                  (1 s load aggregates)
//   train    -> model.json
//   predict  -> predictions.csv
//   evaluate -> report.json + ecdf.csv
//
// `pipeline` runs the whole chain in memory with k-fold cross validation and
// records a manifest of everything it produced, `calibrate` measures the
// sniffer false-activation rate on pure noise.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ratecast/csv.hpp"
#include "ratecast/json_io.hpp"
#include "ratecast/pipeline.hpp"

namespace {

using namespace ratecast;

constexpr const char* kToolVersion = "0.1.0";

constexpr char kGridMagic[8] = {'R', 'C', 'G', 'R', 'I', 'D', '0', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = char((v >> (8 * i)) & 0xff);
    out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = char((v >> (8 * i)) & 0xff);
    out.write(b, 8);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
    return v;
}

// Grid stream layout: magic, u32 n_cce, u64 n_subframes, then one packed
// record per subframe (LSB-first bits, ceil(n_cce * 72 / 8) bytes each).
// Subframe numbers are implicit, counting from zero.
void write_grid_record(std::ostream& out, const SubframeGrid& g, std::vector<char>& buf) {
    buf.assign((g.bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < g.bits.size(); ++i) {
        buf[i / 8] = char(buf[i / 8] | ((g.bits[i] & 1) << (i % 8)));
    }
    out.write(buf.data(), std::streamsize(buf.size()));
}

void read_grid_record(std::istream& in, SubframeGrid& g, std::vector<char>& buf) {
    buf.resize((g.bits.size() + 7) / 8);
    in.read(buf.data(), std::streamsize(buf.size()));
    for (std::size_t i = 0; i < g.bits.size(); ++i) {
        g.bits[i] = std::uint8_t((buf[i / 8] >> (i % 8)) & 1);
    }
}

constexpr const char* kTruthHeader =
    "subframe,effective_subframe,rnti,format,start_rb,n_rbs,mcs,tbs,aggregation_level,cce_start";

void write_truth(std::ostream& out, const std::vector<TruthRecord>& recs) {
    out << kTruthHeader << '\n';
    for (const auto& r : recs) {
        out << r.subframe << ',' << r.effective_subframe << ',' << r.rnti << ','
            << format_name(r.format) << ',' << r.start_rb << ',' << r.n_rbs << ',' << r.mcs << ','
            << r.tbs << ',' << r.agg << ',' << r.cce_start << '\n';
    }
}

Json counters_to_json(const SnifferCounters& c) {
    Json j;
    j["decode_attempts"] = c.decode_attempts;
    j["crc_candidates"] = c.crc_candidates;
    j["position_drops"] = c.position_drops;
    j["histogram_drops"] = c.histogram_drops;
    j["duplicate_drops"] = c.duplicate_drops;
    j["parse_drops"] = c.parse_drops;
    j["accepted"] = c.accepted;
    return j;
}

constexpr const char* kPredictionsHeader = "predicted_bps,baseline_bps,label_rate_bps";

void write_predictions(std::ostream& out, const CvResult& cv) {
    out << kPredictionsHeader << '\n';
    for (std::size_t i = 0; i < cv.label.size(); ++i) {
        out << detail::fmt_double(cv.predicted[i]) << ',' << detail::fmt_double(cv.baseline[i])
            << ',' << detail::fmt_double(cv.label[i]) << '\n';
    }
}

CvResult read_predictions(std::istream& in) {
    detail::expect_header(in, kPredictionsHeader, "predictions");
    CvResult cv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv(line);
        if (f.size() != 3) throw std::runtime_error("predictions: bad row: " + line);
        cv.predicted.push_back(std::stod(f[0]));
        cv.baseline.push_back(std::stod(f[1]));
        cv.label.push_back(std::stod(f[2]));
    }
    return cv;
}

Json report_json(const CvResult& cv) {
    Json j;
    j["n_rows"] = cv.label.size();
    j["learned"] = evaluation_to_json(evaluate(cv.predicted, cv.label));
    j["closed_form"] = evaluation_to_json(evaluate(cv.baseline, cv.label));
    j["reference_rmse_kbps"] = reference_rmse_kbps();
    return j;
}

// Plot-ready ECDF of absolute prediction error, one row per 0.1 Mbit/s bucket.
void write_ecdf_csv(const std::filesystem::path& path, const CvResult& cv) {
    const Evaluation learned = evaluate(cv.predicted, cv.label);
    const Evaluation closed = evaluate(cv.baseline, cv.label);
    write_file_atomic(path, [&](std::ostream& out) {
        out << "error_below_mbps,learned,closed_form\n";
        for (std::size_t b = 0; b < learned.ecdf.size(); ++b) {
            out << detail::fmt_double(double(b + 1) / 10.0) << ','
                << detail::fmt_double(learned.ecdf[b]) << ','
                << detail::fmt_double(closed.ecdf[b]) << '\n';
        }
    });
}

void print_report_summary(const CvResult& cv) {
    const Evaluation learned = evaluate(cv.predicted, cv.label);
    const Evaluation closed = evaluate(cv.baseline, cv.label);
    std::cout << "rows: " << cv.label.size() << '\n'
              << "learned      rmse: " << detail::fmt_double(learned.rmse_bps / 1000.0)
              << " kbit/s, below 1.5 Mbit/s: "
              << detail::fmt_double(learned.frac_below_1_5_mbps) << '\n'
              << "closed form  rmse: " << detail::fmt_double(closed.rmse_bps / 1000.0)
              << " kbit/s, below 1.5 Mbit/s: " << detail::fmt_double(closed.frac_below_1_5_mbps)
              << '\n';
}

struct TrainOptions {
    std::vector<unsigned> hidden = {10, 5};
    double learning_rate = 0.01;
    double momentum = 0.9;
    unsigned epochs = 2000;
    std::uint64_t seed = 1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--hidden", hidden, "Hidden layer widths")->delimiter(',');
        cmd->add_option("--learning-rate", learning_rate, "SGD learning rate");
        cmd->add_option("--momentum", momentum, "SGD momentum");
        cmd->add_option("--epochs", epochs, "Training epochs");
        cmd->add_option("--seed", seed, "Weight init and shuffle seed");
    }

    MlpConfig to_config() const {
        MlpConfig cfg;
        cfg.layers.clear();
        cfg.layers.push_back(kFeatureCount);
        for (unsigned h : hidden) cfg.layers.push_back(h);
        cfg.layers.push_back(1);
        cfg.learning_rate = learning_rate;
        cfg.momentum = momentum;
        cfg.epochs = epochs;
        cfg.seed = seed;
        return cfg;
    }
};

std::vector<FeatureRow> load_features_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_features(in);
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir, bool keep_truth,
                 std::optional<unsigned> duration_s) {
    ScenarioConfig sc = load_scenario(scenario_path);
    if (duration_s) {
        sc.duration_s = *duration_s;
        validate(sc);
    }
    const SimConfig sim_cfg = make_sim_config(sc);
    CellSim sim(sim_cfg);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    const std::uint64_t total = std::uint64_t(sc.duration_s) * 1000;

    std::vector<TruthRecord> truth;
    write_file_atomic(dir / "grid.bin", [&](std::ostream& out) {
        out.write(kGridMagic, 8);
        put_u32(out, sim_cfg.cell.n_cce);
        put_u64(out, total);
        std::vector<char> buf;
        for (std::uint64_t t = 0; t < total; ++t) {
            const SubframeGrid& g = sim.step();
            write_grid_record(out, g, buf);
            if (keep_truth) {
                const auto& tr = sim.subframe_truth();
                truth.insert(truth.end(), tr.begin(), tr.end());
            }
        }
    });
    write_file_atomic(dir / "transfers.csv",
                      [&](std::ostream& out) { write_transfers(out, sim.transfers()); });
    if (keep_truth) {
        write_file_atomic(dir / "truth.csv", [&](std::ostream& out) { write_truth(out, truth); });
    }

    Json meta;
    meta["scenario"] = scenario_to_json(sc);
    meta["dut_rnti"] = sim_cfg.dut_rnti;
    meta["n_subframes"] = total;
    meta["n_cce"] = sim_cfg.cell.n_cce;
    meta["n_transfers"] = sim.transfers().size();
    save_json((dir / "meta.json").string(), meta);

    std::cout << "dut_rnti: " << sim_cfg.dut_rnti << '\n'
              << "subframes: " << total << '\n'
              << "transfers: " << sim.transfers().size() << '\n';
    return 0;
}

int cmd_sniff(const std::string& grid_path, const std::string& out_dir, unsigned window_ms,
              unsigned threshold) {
    std::ifstream in(grid_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + grid_path);
    char magic[8];
    in.read(magic, 8);
    if (!in || !std::equal(magic, magic + 8, kGridMagic)) {
        throw std::runtime_error("not a grid stream: " + grid_path);
    }
    const std::uint32_t n_cce = get_u32(in);
    const std::uint64_t total = get_u64(in);
    if (!in || n_cce == 0 || n_cce > 1024) {
        throw std::runtime_error("bad grid header: " + grid_path);
    }

    SnifferConfig cfg;
    cfg.cell.n_cce = n_cce;
    cfg.window = window_ms;
    cfg.threshold = threshold;
    Sniffer sniffer(cfg);

    std::vector<DecodedDci> dcis;
    std::vector<NUeSample> nue;
    std::vector<DecodedDci> out;
    SubframeGrid g(n_cce);
    std::vector<char> buf;
    for (std::uint64_t t = 0; t < total; ++t) {
        g.subframe = t;
        read_grid_record(in, g, buf);
        if (!in) {
            throw std::runtime_error("grid stream truncated at subframe " + std::to_string(t) +
                                     ": " + grid_path);
        }
        out.clear();
        sniffer.process(g, out);
        dcis.insert(dcis.end(), out.begin(), out.end());
        nue.push_back({t, sniffer.n_ue(), sniffer.n_ue_dl(), sniffer.n_ue_ul()});
    }

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    write_file_atomic(dir / "dcis.csv", [&](std::ostream& o) { write_dci_log(o, dcis); });
    write_file_atomic(dir / "nue.csv", [&](std::ostream& o) { write_nue_log(o, nue); });
    save_json((dir / "counters.json").string(), counters_to_json(sniffer.counters()));

    const SnifferCounters& c = sniffer.counters();
    std::cout << "subframes: " << total << '\n'
              << "attempts: " << c.decode_attempts << '\n'
              << "candidates: " << c.crc_candidates << '\n'
              << "drops: position " << c.position_drops << ", histogram " << c.histogram_drops
              << ", duplicate " << c.duplicate_drops << ", parse " << c.parse_drops << '\n'
              << "accepted: " << c.accepted << '\n'
              << "n_ue (last): " << sniffer.n_ue() << '\n';
    return 0;
}

int cmd_features(const std::string& dcis_path, const std::string& nue_path,
                 const std::string& transfers_path, unsigned dut_rnti, const std::string& out_path) {
    std::ifstream dci_in(dcis_path);
    if (!dci_in) throw std::runtime_error("cannot open " + dcis_path);
    std::ifstream nue_in(nue_path);
    if (!nue_in) throw std::runtime_error("cannot open " + nue_path);
    std::ifstream tr_in(transfers_path);
    if (!tr_in) throw std::runtime_error("cannot open " + transfers_path);

    const auto dcis = read_dci_log(dci_in);
    const auto nue = read_nue_log(nue_in);
    const auto transfers = read_transfers(tr_in);
    const auto rows = build_features(dcis, nue, transfers, std::uint16_t(dut_rnti));

    write_file_atomic(out_path, [&](std::ostream& o) { write_features(o, rows); });
    std::cout << "rows: " << rows.size() << '\n';
    return 0;
}

int cmd_train(const std::string& features_path, const TrainOptions& opt,
              const std::string& out_path) {
    const auto rows = load_features_file(features_path);
    if (rows.empty()) throw std::runtime_error("no feature rows in " + features_path);
    Predictor p(opt.to_config());
    p.train(rows);
    save_json(out_path, model_to_json(p));
    std::cout << "rows: " << rows.size() << '\n'
              << "final loss: " << detail::fmt_double(p.mlp().epoch_losses().back()) << '\n';
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& features_path,
                const std::string& out_path) {
    const Predictor p = model_from_json(load_json(model_path));
    const auto rows = load_features_file(features_path);
    if (rows.empty()) throw std::runtime_error("no feature rows in " + features_path);

    CvResult cv;
    for (const auto& r : rows) {
        cv.predicted.push_back(p.predict(r));
        cv.baseline.push_back(baseline_predict(r));
        cv.label.push_back(r.label_rate_bps);
    }
    write_file_atomic(out_path, [&](std::ostream& o) { write_predictions(o, cv); });
    print_report_summary(cv);
    return 0;
}

int cmd_evaluate(const std::string& predictions_path, const std::string& out_path) {
    std::ifstream in(predictions_path);
    if (!in) throw std::runtime_error("cannot open " + predictions_path);
    const CvResult cv = read_predictions(in);
    save_json(out_path, report_json(cv));
    write_ecdf_csv(std::filesystem::path(out_path).parent_path() / "ecdf.csv", cv);
    print_report_summary(cv);
    return 0;
}

int cmd_pipeline(const std::vector<std::string>& scenario_paths, const std::string& out_dir,
                 const TrainOptions& opt, unsigned folds) {
    std::vector<ScenarioConfig> scenarios;
    std::vector<FeatureRow> rows;
    for (const auto& path : scenario_paths) {
        const ScenarioConfig sc = load_scenario(path);
        const CaptureResult cap = run_capture(sc);
        const auto part = build_features(cap.dcis, cap.nue, cap.transfers, cap.dut_rnti);
        rows.insert(rows.end(), part.begin(), part.end());
        scenarios.push_back(sc);
        std::cerr << "[capture] " << sc.name << ": dcis=" << cap.dcis.size()
                  << " transfers=" << cap.transfers.size() << " rows=" << part.size() << '\n';
    }
    if (rows.size() < 2) throw std::runtime_error("pipeline: not enough feature rows");

    const MlpConfig cfg = opt.to_config();
    const CvResult cv = cross_validate(rows, cfg, folds, cfg.seed);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    write_file_atomic(dir / "features.csv", [&](std::ostream& o) { write_features(o, rows); });
    write_file_atomic(dir / "predictions.csv", [&](std::ostream& o) { write_predictions(o, cv); });
    save_json((dir / "report.json").string(), report_json(cv));
    write_ecdf_csv(dir / "ecdf.csv", cv);

    // Run manifest: inputs, seeds, and artifact names (relative to out_dir),
    // written last so everything it lists exists.
    Json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["scenarios"] = Json::array();
    manifest["seeds"]["capture"] = Json::array();
    for (const auto& sc : scenarios) {
        manifest["scenarios"].push_back(scenario_to_json(sc));
        manifest["seeds"]["capture"].push_back(sc.seed);
    }
    manifest["seeds"]["model"] = cfg.seed;
    manifest["folds"] = folds;
    manifest["artifacts"] = {{"features", "features.csv"},
                             {"predictions", "predictions.csv"},
                             {"report", "report.json"},
                             {"ecdf", "ecdf.csv"}};
    save_json((dir / "manifest.json").string(), manifest);
    print_report_summary(cv);
    return 0;
}

int cmd_calibrate(std::uint64_t subframes, std::uint64_t seed, const std::string& out_path) {
    SnifferConfig cfg;
    Sniffer sniffer(cfg);
    std::mt19937_64 rng(seed);
    SubframeGrid g(cfg.cell.n_cce);
    std::vector<DecodedDci> out;
    std::uint64_t activations = 0;
    for (std::uint64_t t = 0; t < subframes; ++t) {
        g.subframe = t;
        fill_background(g, rng);
        out.clear();
        sniffer.process(g, out);
        activations += out.size();
    }

    const SnifferCounters c = sniffer.counters();
    Json j;
    j["subframes"] = subframes;
    j["seed"] = seed;
    j["counters"] = counters_to_json(c);
    j["crc_candidates_per_subframe"] = double(c.crc_candidates) / double(subframes);
    j["accepted_per_subframe"] = double(activations) / double(subframes);
    if (!out_path.empty()) save_json(out_path, j);
    std::cout << j.dump(2) << '\n';
    return activations == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Passive LTE cell load capture and data rate prediction"};
    app.require_subcommand(1);

    std::string scenario_path, grid_path, out_dir, out_path;
    std::string dcis_path, nue_path, transfers_path, features_path, model_path, predictions_path;
    std::vector<std::string> scenario_paths;
    unsigned dut_rnti = 0;
    unsigned folds = 10;
    unsigned duration_s = 0;
    unsigned window_ms = 500;
    unsigned threshold = 8;
    std::uint64_t cal_subframes = 10000;
    std::uint64_t cal_seed = 1;
    bool keep_truth = false;
    TrainOptions train_opt;

    auto* sim = app.add_subcommand("simulate", "Run a scenario and write the raw control stream");
    sim->add_option("--scenario,--config", scenario_path, "Scenario JSON")->required();
    sim->add_option("--out", out_dir, "Output directory")->required();
    sim->add_flag("--truth", keep_truth, "Also write ground-truth grants");
    auto* dur = sim->add_option("--duration", duration_s, "Override scenario duration in seconds");

    auto* sn = app.add_subcommand("sniff", "Blind-decode a recorded control stream");
    sn->add_option("--grid", grid_path, "grid.bin from simulate")->required();
    sn->add_option("--out", out_dir, "Output directory")->required();
    sn->add_option("--window-ms", window_ms, "Activity histogram window");
    sn->add_option("--threshold", threshold, "Histogram hits before an RNTI is believed");

    auto* fe = app.add_subcommand("features", "Aggregate load features per transfer");
    fe->add_option("--dcis", dcis_path, "dcis.csv from sniff")->required();
    fe->add_option("--nue", nue_path, "nue.csv from sniff")->required();
    fe->add_option("--transfers", transfers_path, "transfers.csv from simulate")->required();
    fe->add_option("--dut-rnti", dut_rnti, "RNTI of the device under test")->required();
    fe->add_option("--out", out_path, "Output features.csv")->required();

    auto* tr = app.add_subcommand("train", "Fit the rate predictor");
    tr->add_option("--features", features_path, "features.csv")->required();
    tr->add_option("--out", out_path, "Output model.json")->required();
    train_opt.attach(tr);

    auto* pr = app.add_subcommand("predict", "Apply a trained model");
    pr->add_option("--model", model_path, "model.json")->required();
    pr->add_option("--features", features_path, "features.csv")->required();
    pr->add_option("--out", out_path, "Output predictions.csv")->required();

    auto* ev = app.add_subcommand("evaluate", "Error statistics for a prediction set");
    ev->add_option("--predictions", predictions_path, "predictions.csv")->required();
    ev->add_option("--out", out_path, "Output report.json")->required();

    auto* pl = app.add_subcommand("pipeline", "Capture, cross-validate, and report in one go");
    pl->add_option("--scenario,--config", scenario_paths, "Scenario JSON files")->required();
    pl->add_option("--out", out_dir, "Output directory")->required();
    pl->add_option("--folds", folds, "Cross-validation folds");
    train_opt.attach(pl);

    auto* ca = app.add_subcommand("calibrate", "Sniffer false-activation rate on pure noise");
    ca->add_option("--subframes", cal_subframes, "Noise subframes to scan");
    ca->add_option("--seed", cal_seed, "Noise seed");
    ca->add_option("--out", out_path, "Optional report JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) {
            const auto duration =
                *dur ? std::optional<unsigned>(duration_s) : std::optional<unsigned>();
            return cmd_simulate(scenario_path, out_dir, keep_truth, duration);
        }
        if (sn->parsed()) return cmd_sniff(grid_path, out_dir, window_ms, threshold);
        if (fe->parsed()) {
            return cmd_features(dcis_path, nue_path, transfers_path, dut_rnti, out_path);
        }
        if (tr->parsed()) return cmd_train(features_path, train_opt, out_path);
        if (pr->parsed()) return cmd_predict(model_path, features_path, out_path);
        if (ev->parsed()) return cmd_evaluate(predictions_path, out_path);
        if (pl->parsed()) return cmd_pipeline(scenario_paths, out_dir, train_opt, folds);
        if (ca->parsed()) return cmd_calibrate(cal_subframes, cal_seed, out_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
