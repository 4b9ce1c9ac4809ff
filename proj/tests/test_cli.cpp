// Drives the installed binary end to end and checks the file-based chain
// against the in-process capture path.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ratecast/csv.hpp"
#include "ratecast/json_io.hpp"
#include "ratecast/pipeline.hpp"

using namespace ratecast;
namespace fs = std::filesystem;

namespace {

std::string bin_path() {
    if (const char* env = std::getenv("RATECAST_BIN")) return env;
    return "./ratecast";
}

int run(const std::string& args) {
    const std::string cmd = bin_path() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ScenarioConfig small_scenario(const std::string& name, std::uint64_t seed) {
    ScenarioConfig sc;
    sc.name = name;
    sc.duration_s = 20;
    sc.arrangement = "distributed";
    sc.traffic = "mixed";
    sc.n_stg = 4;
    sc.dut_placement = "near";
    sc.p_noise = 0.0;
    sc.seed = seed;
    return sc;
}

}  // namespace

TEST_CASE("file chain matches in-process capture") {
    const fs::path dir = fresh_dir("ratecast_cli_chain");
    const ScenarioConfig sc = small_scenario("chain", 21);
    save_json((dir / "s.json").string(), scenario_to_json(sc));

    REQUIRE(run("simulate --scenario " + (dir / "s.json").string() + " --out " +
                (dir / "cap").string()) == 0);
    REQUIRE(run("sniff --grid " + (dir / "cap/grid.bin").string() + " --out " +
                (dir / "sn").string()) == 0);

    const Json meta = load_json((dir / "cap/meta.json").string());
    const auto dut_rnti = meta.at("dut_rnti").get<unsigned>();

    REQUIRE(run("features --dcis " + (dir / "sn/dcis.csv").string() + " --nue " +
                (dir / "sn/nue.csv").string() + " --transfers " +
                (dir / "cap/transfers.csv").string() + " --dut-rnti " + std::to_string(dut_rnti) +
                " --out " + (dir / "features.csv").string()) == 0);

    const CaptureResult cap = run_capture(sc);
    CHECK(cap.dut_rnti == dut_rnti);

    std::ostringstream want_dcis;
    write_dci_log(want_dcis, cap.dcis);
    CHECK(slurp(dir / "sn/dcis.csv") == want_dcis.str());

    std::ostringstream want_nue;
    write_nue_log(want_nue, cap.nue);
    CHECK(slurp(dir / "sn/nue.csv") == want_nue.str());

    std::ostringstream want_transfers;
    write_transfers(want_transfers, cap.transfers);
    CHECK(slurp(dir / "cap/transfers.csv") == want_transfers.str());

    const auto rows = build_features(cap.dcis, cap.nue, cap.transfers, cap.dut_rnti);
    std::ostringstream want_rows;
    write_features(want_rows, rows);
    CHECK(slurp(dir / "features.csv") == want_rows.str());
    CHECK(!rows.empty());
}

TEST_CASE("train, predict, evaluate round trip") {
    const fs::path dir = fresh_dir("ratecast_cli_model");

    std::vector<FeatureRow> rows;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
        FeatureRow r{};
        for (auto& v : r.x) v = u(rng);
        r.x[0] = i % 2;
        r.x[17] = -80.0;
        r.x[18] = -6.0;
        r.label_rate_bps = 1e6 * (1.0 + 30.0 * u(rng));
        rows.push_back(r);
    }
    write_file_atomic(dir / "f.csv", [&](std::ostream& o) { write_features(o, rows); });

    REQUIRE(run("train --features " + (dir / "f.csv").string() + " --out " +
                (dir / "m.json").string() + " --epochs 200 --seed 9") == 0);
    REQUIRE(run("predict --model " + (dir / "m.json").string() + " --features " +
                (dir / "f.csv").string() + " --out " + (dir / "p.csv").string()) == 0);
    REQUIRE(run("evaluate --predictions " + (dir / "p.csv").string() + " --out " +
                (dir / "r.json").string()) == 0);

    std::ifstream pin(dir / "p.csv");
    std::string header;
    std::getline(pin, header);
    CHECK(header == "predicted_bps,baseline_bps,label_rate_bps");
    std::size_t n = 0;
    for (std::string line; std::getline(pin, line);) n += !line.empty();
    CHECK(n == rows.size());

    const Json rep = load_json((dir / "r.json").string());
    CHECK(rep.at("n_rows").get<std::size_t>() == rows.size());
    CHECK(rep.at("learned").contains("rmse_bps"));
    CHECK(rep.at("closed_form").contains("frac_below_1_5_mbps"));
    CHECK(rep.at("learned").at("ecdf").size() == 100);

    const Predictor p = model_from_json(load_json((dir / "m.json").string()));
    std::ifstream cin(dir / "p.csv");
    std::getline(cin, header);
    std::string line;
    std::getline(cin, line);
    const auto f = detail::split_csv(line);
    REQUIRE(f.size() == 3);
    CHECK(std::stod(f[0]) == Catch::Approx(p.predict(rows[0])).margin(1.0));
    CHECK(std::stod(f[1]) == Catch::Approx(baseline_predict(rows[0])).margin(1.0));

    std::ifstream ein(dir / "ecdf.csv");
    REQUIRE(ein.good());
    std::getline(ein, header);
    CHECK(header == "error_below_mbps,learned,closed_form");
    double prev_learned = 0.0, prev_closed = 0.0;
    std::size_t n_buckets = 0;
    while (std::getline(ein, line)) {
        if (line.empty()) continue;
        const auto e = detail::split_csv(line);
        REQUIRE(e.size() == 3);
        const double learned = std::stod(e[1]), closed = std::stod(e[2]);
        CHECK(learned >= prev_learned);
        CHECK(closed >= prev_closed);
        prev_learned = learned;
        prev_closed = closed;
        ++n_buckets;
    }
    CHECK(n_buckets == 100);
}

TEST_CASE("pipeline verb is deterministic") {
    const fs::path dir = fresh_dir("ratecast_cli_pipe");
    save_json((dir / "a.json").string(), scenario_to_json(small_scenario("a", 31)));
    save_json((dir / "b.json").string(), scenario_to_json(small_scenario("b", 32)));

    const std::string args = "pipeline --scenario " + (dir / "a.json").string() + " " +
                             (dir / "b.json").string() + " --folds 3 --epochs 200 --out ";
    REQUIRE(run(args + (dir / "run1").string()) == 0);
    REQUIRE(run(args + (dir / "run2").string()) == 0);

    for (const char* f :
         {"features.csv", "predictions.csv", "report.json", "ecdf.csv", "manifest.json"}) {
        CHECK(slurp(dir / "run1" / f) == slurp(dir / "run2" / f));
    }
    const Json rep = load_json((dir / "run1/report.json").string());
    CHECK(rep.at("n_rows").get<std::size_t>() >= 2);

    const Json man = load_json((dir / "run1/manifest.json").string());
    CHECK(man.at("scenarios").size() == 2);
    CHECK(man.at("seeds").at("capture") == Json({31, 32}));
    CHECK(man.at("seeds").contains("model"));
    CHECK(man.contains("tool_version"));
    for (const auto& [key, name] : man.at("artifacts").items()) {
        CHECK(fs::exists(dir / "run1" / name.get<std::string>()));
    }
}

TEST_CASE("calibrate reports zero activations on noise") {
    const fs::path dir = fresh_dir("ratecast_cli_cal");
    REQUIRE(run("calibrate --subframes 2000 --seed 4 --out " + (dir / "cal.json").string()) == 0);
    const Json cal = load_json((dir / "cal.json").string());
    CHECK(cal.at("counters").at("accepted").get<std::uint64_t>() == 0);
    CHECK(cal.at("counters").at("decode_attempts").get<std::uint64_t>() == 2000ull * 380);
}

TEST_CASE("exit codes distinguish config and data errors") {
    const fs::path dir = fresh_dir("ratecast_cli_err");
    CHECK(run("train --features " + (dir / "missing.csv").string() + " --out " +
              (dir / "m.json").string()) == 3);
    CHECK(run("train --features") == 2);
    CHECK(run("bogus-verb") == 2);
    CHECK(run("--help") == 0);

    save_json((dir / "bad.json").string(),
              Json{{"name", "x"}, {"duration_s", 10}, {"arrangement", "nowhere"},
                   {"traffic", "high"}, {"n_stg", 2}, {"dut_placement", "near"},
                   {"p_noise", 0.0}, {"seed", 1}});
    CHECK(run("simulate --scenario " + (dir / "bad.json").string() + " --out " +
              (dir / "cap").string()) == 2);

    std::ofstream bad(dir / "notagrid.bin", std::ios::binary);
    bad << "garbage";
    bad.close();
    CHECK(run("sniff --grid " + (dir / "notagrid.bin").string() + " --out " +
              (dir / "sn").string()) == 3);
}

TEST_CASE("sniffer knobs and degenerate inputs") {
    const fs::path dir = fresh_dir("ratecast_cli_knobs");
    ScenarioConfig sc = small_scenario("knobs", 41);
    sc.duration_s = 10;
    save_json((dir / "s.json").string(), scenario_to_json(sc));

    REQUIRE(run("simulate --scenario " + (dir / "s.json").string() + " --out " +
                (dir / "cap").string()) == 0);

    // A lower histogram threshold believes RNTIs earlier, so it accepts
    // strictly more on the same stream (no warmup drops).
    REQUIRE(run("sniff --grid " + (dir / "cap/grid.bin").string() + " --out " +
                (dir / "sn8").string()) == 0);
    REQUIRE(run("sniff --grid " + (dir / "cap/grid.bin").string() + " --out " +
                (dir / "sn1").string() + " --threshold 1 --window-ms 500") == 0);
    const auto accepted = [&](const char* sub) {
        return load_json((dir / sub / "counters.json").string())
            .at("accepted")
            .get<std::uint64_t>();
    };
    CHECK(accepted("sn1") > accepted("sn8"));

    // Zero-subframe stream: empty logs, zero counters, success.
    {
        std::ofstream out(dir / "empty.bin", std::ios::binary);
        out << "RCGRID01";
        const unsigned char tail[12] = {41, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
        out.write(reinterpret_cast<const char*>(tail), sizeof tail);
    }
    REQUIRE(run("sniff --grid " + (dir / "empty.bin").string() + " --out " +
                (dir / "sn0").string()) == 0);
    const Json zero = load_json((dir / "sn0/counters.json").string());
    CHECK(zero.at("decode_attempts").get<std::uint64_t>() == 0);
    CHECK(zero.at("accepted").get<std::uint64_t>() == 0);
    std::ostringstream empty_log;
    write_dci_log(empty_log, {});
    CHECK(slurp(dir / "sn0/dcis.csv") == empty_log.str());

    // --duration overrides the scenario file; zero stays a config error.
    CHECK(run("simulate --config " + (dir / "s.json").string() + " --out " +
              (dir / "cap1").string() + " --duration 1") == 0);
    CHECK(load_json((dir / "cap1/meta.json").string()).at("n_subframes").get<std::uint64_t>() ==
          1000);
    CHECK(run("simulate --scenario " + (dir / "s.json").string() + " --out " +
              (dir / "cap0").string() + " --duration 0") == 2);
}
