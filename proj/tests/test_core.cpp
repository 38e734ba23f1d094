#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tmcm/core.hpp"

using namespace tmcm;

TEST_CASE("ceil_log2") {
    CHECK(ceil_log2(1) == 0);
    CHECK(ceil_log2(2) == 1);
    CHECK(ceil_log2(3) == 2);
    CHECK(ceil_log2(4) == 2);
    CHECK(ceil_log2(5) == 3);
    CHECK(ceil_log2(1024) == 10);
    CHECK(ceil_log2(1025) == 11);
}

TEST_CASE("constant_set_new fields") {
    ConstantSet cs = constant_set_new({13, 23}, 8);
    CHECK(cs.n == 2);
    CHECK(cs.m == 1);
    CHECK(cs.mbw == 5);
    CHECK(cs.ibw == 8);

    ConstantSet c3 = constant_set_new({1, -2, 3}, 6);
    CHECK(c3.m == 2);
    CHECK(c3.mbw >= 1);

    CHECK_THROWS(constant_set_new({}, 8));
    CHECK_THROWS(constant_set_new({5, 5}, 8));
    CHECK_THROWS(constant_set_new({0}, 8));
}

TEST_CASE("binary digits reconstruct") {
    for (int64_t c = -300; c <= 300; ++c) {
        if (c == 0) continue;
        DigitVector d = to_binary_digits(c, 10);
        CHECK(d.value() == c);
        int ones = 0;
        for (int8_t g : d.digits) {
            CHECK((g == 0 || g == 1));
            ones += g != 0;
        }
        // number of nonzero digits equals popcount of |c|
        int64_t a = c < 0 ? -c : c;
        int pc = 0;
        for (; a; a >>= 1) pc += int(a & 1);
        CHECK(ones == pc);
    }
}

TEST_CASE("csd canonical and value-preserving") {
    for (int64_t c = -1024; c <= 1024; ++c) {
        DigitVector d = to_csd(c);
        CHECK(d.value() == c);
        for (size_t t = 0; t + 1 < d.digits.size(); ++t) {
            CHECK(d.digits[t] >= -1);
            CHECK(d.digits[t] <= 1);
            // canonical: no two adjacent nonzero digits
            CHECK((d.digits[t] == 0 || d.digits[t + 1] == 0));
        }
    }
    CHECK(to_csd(23).nonzero_count() == 3);  // 32 - 8 - 1
    CHECK(to_csd(13).nonzero_count() == 3);  // 16 - 4 + 1
    CHECK(to_csd(15).nonzero_count() == 2);  // 16 - 1
}

TEST_CASE("csd never uses more digits than binary") {
    for (int64_t c = 1; c <= 2048; ++c)
        CHECK(to_csd(c).nonzero_count() <= to_binary_digits(c, 13).nonzero_count());
}

TEST_CASE("hamming distance") {
    // popcount-of-xor oracle over the 5-bit field
    for (int64_t a = -16; a < 16; ++a)
        for (int64_t b = -16; b < 16; ++b) {
            uint64_t x = (uint64_t(a) ^ uint64_t(b)) & 31u;
            int pc = 0;
            for (; x; x >>= 1) pc += int(x & 1);
            CHECK(hamming(a, b, 5) == pc);
            CHECK(hamming(a, b, 5) == hamming(b, a, 5));
        }
    CHECK(hamming(13, 12, 5) == 1);
    CHECK(hamming(13, 9, 5) == 1);
    CHECK(hamming(23, 22, 5) == 1);
    CHECK(hamming(23, 19, 5) == 1);
    CHECK(hamming(13, 13, 5) == 0);
}

TEST_CASE("two's complement fit") {
    CHECK(fits_twos_complement(-16, 5));
    CHECK(fits_twos_complement(15, 5));
    CHECK_FALSE(fits_twos_complement(16, 5));
    CHECK_FALSE(fits_twos_complement(-17, 5));
}
