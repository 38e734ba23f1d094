#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tmcm/decoy.hpp"
#include "tmcm/gatenet.hpp"
#include "tmcm/tmcm.hpp"
#include "tmcm/wordir.hpp"

namespace tmcm {

// Activated-design oracle: answers queries with the hidden correct key and
// never exposes it. Safe to query from several attack threads.
class Oracle {
  public:
    Oracle(const WordNetlist& design, KeyAssignment correct_key)
        : design_(design), key_(std::move(correct_key)) {}

    int64_t query(int64_t x, int sel) const;
    uint64_t query_count() const { return queries_.load(); }
    int ibw() const { return design_.ibw; }
    int select_count() const { return design_.n; }
    int out_width() const { return design_.out_width; }

  private:
    const WordNetlist& design_;
    KeyAssignment key_;
    mutable std::atomic<uint64_t> queries_{0};
};

struct VerifyReport {
    bool pass = false;
    uint64_t checked = 0;
    // First mismatch, if any.
    int64_t witness_x = 0;
    int witness_i = 0;
    int64_t got = 0, expected = 0;

    std::string to_string() const;
};

// Checks design output == c_i * x with the plan's correct key; exhaustive
// for ibw <= 10, otherwise `samples` seeded random vectors.
VerifyReport verify_correct_key(const WordNetlist& design, const DecoyPlan& plan,
                                int samples = 10000, uint64_t seed = 0);

struct CorruptionWitness {
    int sel = 0;
    int64_t x = 0;
    int64_t constant = 0; // effective (decoy) constant
};

// Clean for the correct key; otherwise a witness naming the decoy that the
// wrong key selects.
std::optional<CorruptionWitness> corruption_check(const WordNetlist& design, const DecoyPlan& plan,
                                                  const KeyAssignment& key);

struct FirTraceRow {
    uint64_t cycle = 0;
    int64_t x = 0;
    int sel = 0;
    std::optional<int64_t> y;
};

// Cycle simulation of the folded filter; one output per `taps` cycles.
std::vector<int64_t> simulate_folded_fir(const FoldedFir& fir, const std::vector<int64_t>& x_stream,
                                         const std::vector<uint8_t>& key,
                                         std::vector<FirTraceRow>* trace = nullptr);

std::string trace_to_csv(const std::vector<FirTraceRow>& trace);

// Direct convolution reference, zero initial conditions.
std::vector<int64_t> direct_convolution(const std::vector<int64_t>& h,
                                        const std::vector<int64_t>& x);

} // namespace tmcm
