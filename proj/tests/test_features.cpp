#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "ratecast/csv.hpp"
#include "ratecast/features.hpp"
#include "ratecast/scenario.hpp"

using namespace ratecast;

namespace {

DecodedDci make_dci(std::uint64_t sf, std::uint16_t rnti, DciFormat fmt, unsigned n_rbs,
                    unsigned mcs) {
    DecodedDci d;
    d.subframe = sf;
    d.effective_subframe = sf + (is_uplink(fmt) ? kUplinkDelay : 0);
    d.dci.rnti = rnti;
    d.dci.format = fmt;
    d.dci.n_rbs = n_rbs;
    d.dci.mcs = mcs;
    d.tbs = compute_tbs(mcs, n_rbs);
    d.agg = 2;
    d.cce_start = 0;
    return d;
}

std::vector<NUeSample> flat_nue(std::uint64_t n, unsigned dl, unsigned ul) {
    std::vector<NUeSample> out;
    for (std::uint64_t t = 0; t < n; ++t) out.push_back({t, dl + ul, dl, ul});
    return out;
}

DutTransfer make_transfer(std::uint64_t start, bool ul, double rate) {
    DutTransfer t;
    t.start_ms = start;
    t.end_ms = start + 100;
    t.uplink = ul;
    t.bytes = 1'000'000;
    t.rate_bps = rate;
    t.rsrp_dbm = -93.0;
    t.rsrq_db = -5.25;
    return t;
}

}  // namespace

TEST_CASE("window statistics match hand-computed values") {
    std::vector<DecodedDci> dcis;
    dcis.push_back(make_dci(10, 5, DciFormat::F1, 10, 20));
    dcis.push_back(make_dci(11, 6, DciFormat::F2, 30, 10));
    const auto nue = flat_nue(1000, 2, 1);
    const std::vector<DutTransfer> transfers = {make_transfer(1000, true, 5e6)};

    const auto rows = build_features(dcis, nue, transfers, 999);
    REQUIRE(rows.size() == 1);
    const auto& r = rows[0];

    CHECK(r.x[0] == 1.0);
    CHECK(r.x[1] == Catch::Approx(0.04));
    CHECK(r.x[2] == Catch::Approx(std::sqrt(1.0 - 0.04 * 0.04)));
    const double tbs_a = compute_tbs(20, 10), tbs_b = compute_tbs(10, 30);
    const double tbs_mean = (tbs_a + tbs_b) / 1000.0;
    const double tbs_ms = (tbs_a * tbs_a + tbs_b * tbs_b) / 1000.0;
    CHECK(r.x[3] == Catch::Approx(tbs_mean));
    CHECK(r.x[4] == Catch::Approx(std::sqrt(tbs_ms - tbs_mean * tbs_mean)));
    CHECK(r.x[5] == Catch::Approx(15.0));
    CHECK(r.x[6] == Catch::Approx(5.0));
    CHECK(r.x[7] == Catch::Approx(2.0));
    CHECK(r.x[8] == Catch::Approx(0.0));
    for (unsigned i = 9; i < 15; ++i) CHECK(r.x[i] == 0.0);
    CHECK(r.x[15] == Catch::Approx(1.0));
    CHECK(r.x[16] == Catch::Approx(0.0));
    CHECK(r.x[17] == Catch::Approx(-93.0));
    CHECK(r.x[18] == Catch::Approx(-5.25));
    CHECK(r.label_rate_bps == Catch::Approx(5e6));
}

TEST_CASE("the device's own grants are excluded from the aggregates") {
    std::vector<DecodedDci> dcis;
    dcis.push_back(make_dci(10, 5, DciFormat::F1, 10, 20));
    dcis.push_back(make_dci(11, 6, DciFormat::F2, 30, 10));
    const auto nue = flat_nue(1000, 2, 1);
    const std::vector<DutTransfer> transfers = {make_transfer(1000, false, 1e6)};

    const auto base = build_features(dcis, nue, transfers, 999);
    dcis.push_back(make_dci(500, 999, DciFormat::F1A, 50, 28));
    dcis.push_back(make_dci(501, 999, DciFormat::F0, 50, 28));
    const auto with_dut = build_features(dcis, nue, transfers, 999);
    REQUIRE(base.size() == 1);
    REQUIRE(with_dut.size() == 1);
    for (unsigned i = 0; i < kFeatureCount; ++i) CHECK(base[0].x[i] == with_dut[0].x[i]);
}

TEST_CASE("window covers exactly the thousand subframes before the request") {
    const auto nue = flat_nue(3000, 0, 0);
    const std::vector<DutTransfer> transfers = {make_transfer(2000, false, 1e6)};

    auto rb_mean = [&](std::uint64_t sf) {
        std::vector<DecodedDci> dcis = {make_dci(sf, 5, DciFormat::F1, 10, 20)};
        return build_features(dcis, nue, transfers, 999)[0].x[1];
    };
    CHECK(rb_mean(999) == 0.0);
    CHECK(rb_mean(1000) == Catch::Approx(0.01));
    CHECK(rb_mean(1999) == Catch::Approx(0.01));
    CHECK(rb_mean(2000) == 0.0);
}

TEST_CASE("uplink grants are bucketed where their data lands") {
    const auto nue = flat_nue(3000, 0, 0);
    const std::vector<DutTransfer> transfers = {make_transfer(2000, false, 1e6)};
    // Issued at 1995, effective 1999: inside. Issued at 1996, effective
    // 2000: outside.
    std::vector<DecodedDci> dcis = {make_dci(1995, 5, DciFormat::F0, 10, 20)};
    CHECK(build_features(dcis, nue, transfers, 999)[0].x[9] == Catch::Approx(0.01));
    dcis = {make_dci(1996, 5, DciFormat::F0, 10, 20)};
    CHECK(build_features(dcis, nue, transfers, 999)[0].x[9] == 0.0);
}

TEST_CASE("transfers too early for a full window are dropped") {
    const auto nue = flat_nue(2000, 1, 1);
    const std::vector<DutTransfer> transfers = {make_transfer(500, false, 1e6),
                                                make_transfer(1500, false, 2e6)};
    const auto rows = build_features({}, nue, transfers, 999);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].label_rate_bps == Catch::Approx(2e6));
}

TEST_CASE("feature rows from a live capture are finite and labelled") {
    ScenarioConfig sc;
    sc.name = "smoke";
    sc.duration_s = 30;
    sc.arrangement = "near";
    sc.traffic = "low";
    sc.n_stg = 3;
    sc.dut_placement = "near";
    sc.seed = 33;
    CellSim sim(make_sim_config(sc));
    Sniffer sniffer(SnifferConfig{});

    std::vector<DecodedDci> dcis, out;
    std::vector<NUeSample> nue;
    for (std::uint64_t t = 0; t < 30'000; ++t) {
        const auto& g = sim.step();
        out.clear();
        sniffer.process(g, out);
        dcis.insert(dcis.end(), out.begin(), out.end());
        nue.push_back({t, sniffer.n_ue(), sniffer.n_ue_dl(), sniffer.n_ue_ul()});
    }
    const auto rows = build_features(dcis, nue, sim.transfers(), sim.dut_rnti());
    REQUIRE(rows.size() >= 2);
    REQUIRE(rows.size() == sim.transfers().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].label_rate_bps == Catch::Approx(sim.transfers()[i].rate_bps));
        CHECK(rows[i].x[0] == (sim.transfers()[i].uplink ? 1.0 : 0.0));
        for (double v : rows[i].x) CHECK(std::isfinite(v));
    }
    CHECK(rows[0].x[0] == 0.0);
    CHECK(rows[1].x[0] == 1.0);
}

TEST_CASE("csv streams round-trip") {
    std::vector<DecodedDci> dcis = {make_dci(7, 1234, DciFormat::F1C, 4, 9),
                                    make_dci(8, 4321, DciFormat::F0, 50, 28)};
    std::stringstream s1;
    write_dci_log(s1, dcis);
    const auto d2 = read_dci_log(s1);
    REQUIRE(d2.size() == 2);
    CHECK(d2[0].dci.format == DciFormat::F1C);
    CHECK(d2[0].dci.rnti == 1234);
    CHECK(d2[1].effective_subframe == 12);
    CHECK(d2[1].tbs == dcis[1].tbs);

    std::vector<NUeSample> nue = {{0, 3, 2, 1}, {1, 4, 2, 2}};
    std::stringstream s2;
    write_nue_log(s2, nue);
    const auto n2 = read_nue_log(s2);
    REQUIRE(n2.size() == 2);
    CHECK(n2[1].n_ue_ul == 2);

    std::vector<DutTransfer> tr = {make_transfer(2000, true, 34934497.816593886)};
    std::stringstream s3;
    write_transfers(s3, tr);
    const auto t2 = read_transfers(s3);
    REQUIRE(t2.size() == 1);
    CHECK(t2[0].uplink);
    CHECK(t2[0].rate_bps == Catch::Approx(tr[0].rate_bps).epsilon(1e-5));
    CHECK(t2[0].rsrq_db == Catch::Approx(-5.25));

    FeatureRow row;
    for (unsigned i = 0; i < kFeatureCount; ++i) row.x[i] = 0.125 * i - 3;
    row.label_rate_bps = 1.25e7;
    std::stringstream s4;
    write_features(s4, {row});
    const auto f2 = read_features(s4);
    REQUIRE(f2.size() == 1);
    for (unsigned i = 0; i < kFeatureCount; ++i) CHECK(f2[0].x[i] == Catch::Approx(row.x[i]));
    CHECK(f2[0].label_rate_bps == Catch::Approx(1.25e7));
}

TEST_CASE("csv readers reject foreign headers") {
    std::stringstream s("first,second\n1,2\n");
    CHECK_THROWS_AS(read_dci_log(s), std::runtime_error);
    std::stringstream s2("subframe,n_ue,n_ue_dl,n_ue_ul\n1,2\n");
    CHECK_THROWS_AS(read_nue_log(s2), std::runtime_error);
}

TEST_CASE("atomic writes leave no temp file behind") {
    namespace fs = std::filesystem;
    const fs::path p = fs::temp_directory_path() / "ratecast_csv_test.csv";
    write_file_atomic(p, [](std::ostream& out) { out << "hello\n"; });
    CHECK(fs::exists(p));
    CHECK_FALSE(fs::exists(p.string() + ".tmp"));
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    CHECK(line == "hello");
    fs::remove(p);
}
