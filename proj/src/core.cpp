#include "tmcm/core.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <stdexcept>

namespace tmcm {

int ceil_log2(uint64_t v) {
    int b = 0;
    while ((uint64_t{1} << b) < v) ++b;
    return b;
}

bool fits_twos_complement(int64_t v, int width) {
    if (width <= 0 || width >= 63) return width >= 63;
    int64_t lo = -(int64_t{1} << (width - 1));
    int64_t hi = (int64_t{1} << (width - 1)) - 1;
    return v >= lo && v <= hi;
}

ConstantSet constant_set_new(const std::vector<int64_t>& values, int ibw) {
    if (values.empty()) throw std::invalid_argument("constant set: empty list");
    if (ibw < 1) throw std::invalid_argument("constant set: ibw must be >= 1");
    std::set<int64_t> seen;
    uint64_t maxabs = 0;
    for (int64_t v : values) {
        if (v == 0) throw std::invalid_argument("constant set: zero constant");
        if (!seen.insert(v).second)
            throw std::invalid_argument("constant set: duplicate constant " + std::to_string(v));
        maxabs = std::max<uint64_t>(maxabs, v < 0 ? uint64_t(-v) : uint64_t(v));
    }
    ConstantSet cs;
    cs.targets = values;
    cs.n = int(values.size());
    cs.m = ceil_log2(uint64_t(cs.n));
    cs.mbw = std::max(1, ceil_log2(maxabs));
    cs.ibw = ibw;
    return cs;
}

int64_t DigitVector::value() const {
    int64_t v = 0;
    for (int t = width - 1; t >= 0; --t) v = v * 2 + digits[t];
    return negative ? -v : v;
}

int DigitVector::nonzero_count() const {
    int c = 0;
    for (int8_t d : digits) c += d != 0;
    return c;
}

DigitVector to_binary_digits(int64_t c, int width) {
    uint64_t mag = c < 0 ? uint64_t(-c) : uint64_t(c);
    if (width < 64 && mag >= (uint64_t{1} << width))
        throw std::invalid_argument("binary digits: |c| does not fit in width");
    DigitVector d;
    d.width = width;
    d.negative = c < 0;
    d.digits.resize(width, 0);
    for (int t = 0; t < width; ++t) d.digits[t] = int8_t((mag >> t) & 1);
    return d;
}

DigitVector to_csd(int64_t c) {
    // Classic recoding: replace runs of ones using x = 2x' - x''.
    DigitVector d;
    int64_t v = c;
    while (v != 0) {
        int8_t digit;
        if (v & 1) {
            digit = int8_t(2 - int(v & 3)); // +1 if v mod 4 == 1, -1 if == 3
            v -= digit;
        } else {
            digit = 0;
        }
        d.digits.push_back(digit);
        v >>= 1;
    }
    d.width = int(d.digits.size());
    d.negative = false; // sign is carried by the digits themselves
    return d;
}

static bool fits_bit_pattern(int64_t v, int width) {
    // Nonnegative values may occupy the full unsigned range; negative ones
    // must fit two's complement.
    if (width >= 63) return true;
    if (v < 0) return v >= -(int64_t{1} << (width - 1));
    return v < (int64_t{1} << width);
}

int hamming(int64_t a, int64_t b, int width) {
    if (!fits_bit_pattern(a, width) || !fits_bit_pattern(b, width))
        throw std::invalid_argument("hamming: value does not fit in width");
    uint64_t mask = width >= 64 ? ~uint64_t{0} : (uint64_t{1} << width) - 1;
    uint64_t x = (uint64_t(a) ^ uint64_t(b)) & mask;
    int c = 0;
    while (x) {
        x &= x - 1;
        ++c;
    }
    return c;
}

} // namespace tmcm
