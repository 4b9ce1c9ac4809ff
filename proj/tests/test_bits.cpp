#include <catch2/catch_amalgamated.hpp>

#include "ratecast/bits.hpp"

using namespace ratecast;

TEST_CASE("append and read round-trip") {
    Bits b;
    append_bits(b, 0x2A, 6);
    append_bits(b, 0x1, 1);
    append_bits(b, 0x3FF, 11);
    REQUIRE(b.size() == 18);
    CHECK(read_bits(b, 0, 6) == 0x2A);
    CHECK(read_bits(b, 6, 1) == 0x1);
    CHECK(read_bits(b, 7, 11) == 0x3FF);
}

TEST_CASE("append is MSB first") {
    Bits b;
    append_bits(b, 0b101, 3);
    REQUIRE(b == Bits{1, 0, 1});
    b.clear();
    append_bits(b, 1, 4);
    REQUIRE(b == Bits{0, 0, 0, 1});
}

TEST_CASE("read of zero width") {
    Bits b{1, 1};
    CHECK(read_bits(b, 0, 0) == 0);
}
