#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "ratecast/bits.hpp"
#include "ratecast/crc16.hpp"

using namespace ratecast;

namespace {

Bits ascii_bits(const std::string& s) {
    Bits b;
    for (char c : s) append_bits(b, static_cast<std::uint8_t>(c), 8);
    return b;
}

}  // namespace

TEST_CASE("known check value") {
    // CRC-16/XMODEM of "123456789"
    CHECK(crc16(ascii_bits("123456789")) == 0x31C3);
}

TEST_CASE("empty input") { CHECK(crc16(Bits{}) == 0); }

TEST_CASE("single bit positions differ") {
    Bits a(24, 0), b(24, 0);
    b[5] = 1;
    CHECK(crc16(a) == 0);
    CHECK(crc16(b) != 0);
}

TEST_CASE("linearity over GF(2)") {
    Bits x = ascii_bits("abcdef"), y = ascii_bits("uvwxyz");
    Bits z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] ^ y[i];
    CHECK((crc16(x) ^ crc16(y)) == crc16(z));
}

TEST_CASE("subrange overload") {
    Bits all = ascii_bits("..123456789");
    CHECK(crc16(all, 16, 72) == 0x31C3);
}
