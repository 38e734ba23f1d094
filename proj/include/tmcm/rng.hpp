#pragma once

#include <cstdint>
#include <random>

namespace tmcm {

// mt19937_64 with a hand-rolled bounded draw. std::uniform_int_distribution
// is implementation-defined, which would break byte-identical artifacts
// across toolchains.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next() { return eng_(); }

    // Uniform in [0, bound), bound > 0. Rejection sampling, no modulo bias.
    uint64_t below(uint64_t bound) {
        uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % bound);
        uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % bound;
    }

    // Uniform in [lo, hi] inclusive.
    int64_t range(int64_t lo, int64_t hi) {
        return lo + int64_t(below(uint64_t(hi - lo) + 1));
    }

  private:
    std::mt19937_64 eng_;
};

} // namespace tmcm
