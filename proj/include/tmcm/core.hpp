#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tmcm {

// Ordered set of target constants plus the derived TMCM parameters.
struct ConstantSet {
    std::vector<int64_t> targets;
    int n = 0;    // number of constants
    int m = 0;    // select input width, ceil(log2 n)
    int mbw = 0;  // max constant bit-width, ceil(log2 max|c|), clamped to >= 1
    int ibw = 0;  // data input bit-width
};

// Signed-digit vector, LSB first. Digits in {-1,0,+1}.
// Binary vectors carry the magnitude; `negative` flags the source sign.
struct DigitVector {
    std::vector<int8_t> digits;
    int width = 0;
    bool negative = false;

    int64_t value() const;
    int nonzero_count() const;
};

int ceil_log2(uint64_t v);

ConstantSet constant_set_new(const std::vector<int64_t>& values, int ibw);

DigitVector to_binary_digits(int64_t c, int width);
DigitVector to_csd(int64_t c);

// Differing bit positions of a and b in `width`-bit two's complement.
int hamming(int64_t a, int64_t b, int width);

bool fits_twos_complement(int64_t v, int width);

} // namespace tmcm
