#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "ratecast/dci_codec.hpp"

using namespace ratecast;

TEST_CASE("riv bijection over 50 RBs") {
    std::set<std::uint32_t> seen;
    for (unsigned len = 1; len <= 50; ++len) {
        for (unsigned start = 0; start + len <= 50; ++start) {
            const std::uint32_t riv = riv_encode(50, start, len);
            REQUIRE(riv < 1275);
            REQUIRE(seen.insert(riv).second);
            unsigned s = 0, l = 0;
            REQUIRE(riv_decode(riv, 50, s, l));
            CHECK(s == start);
            CHECK(l == len);
        }
    }
    CHECK(seen.size() == 1275);
    unsigned s = 0, l = 0;
    CHECK_FALSE(riv_decode(1275, 50, s, l));
    CHECK_FALSE(riv_decode(2047, 50, s, l));
}

TEST_CASE("riv bijection over 25 pair units") {
    std::set<std::uint32_t> seen;
    for (unsigned len = 1; len <= 25; ++len) {
        for (unsigned start = 0; start + len <= 25; ++start) {
            seen.insert(riv_encode(25, start, len));
        }
    }
    CHECK(seen.size() == 325);
    unsigned s = 0, l = 0;
    CHECK_FALSE(riv_decode(325, 25, s, l));
}

TEST_CASE("block lengths") {
    CHECK(block_bits(DciFormat::F0) == 42);
    CHECK(block_bits(DciFormat::F1A) == 42);
    CHECK(block_bits(DciFormat::F1) == 45);
    CHECK(block_bits(DciFormat::F1C) == 36);
    CHECK(block_bits(DciFormat::F2A) == 49);
    CHECK(block_bits(DciFormat::F2) == 53);
    for (std::size_t i = 1; i < kBlockLengths.size(); ++i) {
        CHECK(kBlockLengths[i - 1] < kBlockLengths[i]);
    }
}

TEST_CASE("known packed block") {
    Dci d;
    d.format = DciFormat::F1A;
    d.rnti = 0xBEEF;
    d.start_rb = 10;
    d.n_rbs = 5;
    d.mcs = 17;
    d.seq = 9;
    const Bits block = build_block(d, 50);
    REQUIRE(block.size() == 42);
    std::uint64_t packed = 0;
    for (auto b : block) packed = (packed << 1) | b;
    CHECK(packed == 0x234A209A0D7ULL);
    CHECK(recover_rnti(block) == 0xBEEF);
}

TEST_CASE("round-trip all formats") {
    std::mt19937_64 rng(11);
    for (DciFormat f : kAllFormats) {
        for (int it = 0; it < 200; ++it) {
            Dci d;
            d.format = f;
            d.rnti = static_cast<std::uint16_t>(rng() % 65535 + 1);
            d.seq = static_cast<unsigned>(rng()) & ((1u << seq_bits(f)) - 1);
            if (f == DciFormat::F1C) {
                d.mcs = rng() % (kF1cMaxMcs + 1);
                d.n_rbs = (rng() % 25 + 1) * 2;
                d.start_rb = (rng() % (25 - d.n_rbs / 2 + 1)) * 2;
            } else {
                d.mcs = rng() % (kMaxMcs + 1);
                d.n_rbs = rng() % 50 + 1;
                d.start_rb = rng() % (50 - d.n_rbs + 1);
            }
            const Bits block = build_block(d, 50);
            REQUIRE(block.size() == block_bits(f));
            CHECK(recover_rnti(block) == d.rnti);
            const auto parsed = parse_block(block, 50);
            REQUIRE(parsed.has_value());
            CHECK(parsed->format == f);
            CHECK(parsed->start_rb == d.start_rb);
            CHECK(parsed->n_rbs == d.n_rbs);
            CHECK(parsed->mcs == d.mcs);
            CHECK(parsed->seq == d.seq);
        }
    }
}

TEST_CASE("flag bit separates the shared length") {
    Dci d;
    d.format = DciFormat::F0;
    d.rnti = 7;
    d.start_rb = 0;
    d.n_rbs = 50;
    d.mcs = 3;
    Bits block = build_block(d, 50);
    CHECK(parse_block(block, 50)->format == DciFormat::F0);
    CHECK(is_uplink(parse_block(block, 50)->format));
    block[0] ^= 1;
    CHECK(format_for_block(block) == DciFormat::F1A);
}

TEST_CASE("parse rejects bad fields") {
    Dci d;
    d.format = DciFormat::F1;
    d.rnti = 99;
    d.start_rb = 4;
    d.n_rbs = 8;
    d.mcs = 12;
    d.seq = 31;
    Bits good = build_block(d, 50);
    REQUIRE(parse_block(good, 50).has_value());

    SECTION("riv out of range") {
        Bits b = good;
        for (unsigned i = 0; i < kRivBits; ++i) b[i] = 1;
        CHECK_FALSE(parse_block(b, 50).has_value());
    }
    SECTION("mcs above 28") {
        Bits b = good;
        for (unsigned i = 0; i < 5; ++i) b[kRivBits + i] = 1;
        CHECK_FALSE(parse_block(b, 50).has_value());
    }
    SECTION("nonzero padding") {
        Bits b = good;
        b[block_bits(DciFormat::F1) - kCrcBits - 1] = 1;
        CHECK_FALSE(parse_block(b, 50).has_value());
    }
    SECTION("F1C pair riv out of range") {
        Dci c;
        c.format = DciFormat::F1C;
        c.rnti = 5;
        c.start_rb = 0;
        c.n_rbs = 2;
        Bits b = build_block(c, 50);
        for (unsigned i = 0; i < kPairRivBits; ++i) b[i] = 1;
        CHECK_FALSE(parse_block(b, 50).has_value());
    }
}

TEST_CASE("pack preconditions") {
    Dci d;
    d.format = DciFormat::F1C;
    d.start_rb = 1;
    d.n_rbs = 2;
    CHECK_THROWS_AS(pack_dci(d, 50), std::invalid_argument);
    d.start_rb = 0;
    d.mcs = 16;
    CHECK_THROWS_AS(pack_dci(d, 50), std::invalid_argument);
    Dci e;
    e.format = DciFormat::F1;
    e.n_rbs = 4;
    e.mcs = 29;
    CHECK_THROWS_AS(pack_dci(e, 50), std::invalid_argument);
}

TEST_CASE("minimum aggregation levels") {
    CHECK(min_agg(DciFormat::F1C) == 1);
    CHECK(min_agg(DciFormat::F0) == 2);
    CHECK(min_agg(DciFormat::F1A) == 2);
    CHECK(min_agg(DciFormat::F1) == 2);
    CHECK(min_agg(DciFormat::F2A) == 2);
    CHECK(min_agg(DciFormat::F2) == 2);
}

TEST_CASE("payload bit flips move the recovered rnti") {
    Dci d;
    d.format = DciFormat::F2;
    d.rnti = 0x1234;
    d.start_rb = 0;
    d.n_rbs = 50;
    d.mcs = 28;
    Bits block = build_block(d, 50);
    for (std::size_t i = 0; i < block.size() - kCrcBits; i += 5) {
        Bits b = block;
        b[i] ^= 1;
        CHECK(recover_rnti(b) != d.rnti);
    }
}
