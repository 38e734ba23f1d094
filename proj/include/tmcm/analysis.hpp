#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tmcm/decoy.hpp"

namespace tmcm {

// Real-valued amplitude of a linear-phase FIR with coefficients h, i.e. the
// frequency response with the e^{-jw(N-1)/2} delay term removed. Negative
// values encode phase flips, unlike |H|.
double zero_phase_response(const std::vector<int64_t>& h, double omega);

// Coefficients the design realizes under `key`: slot constants in tap order.
std::vector<int64_t> coefficients_under_key(const DecoyPlan& plan, const KeyAssignment& key);

struct ResponseCurve {
    std::vector<double> omega;     // grid over [0, pi]
    std::vector<double> amplitude; // zero-phase amplitude at each point
};

ResponseCurve response_curve(const std::vector<int64_t>& h, int points = 512);

struct DeviationMetrics {
    double max_abs_dev = 0.0;
    double rms_dev = 0.0;
    double dc_value = 0.0; // amplitude at omega = 0
};

DeviationMetrics deviation_metrics(const ResponseCurve& ref, const ResponseCurve& got);

struct SweepRow {
    int key_id = 0; // 0 = correct key
    KeyAssignment key;
    DeviationMetrics metrics;
};

struct SweepResult {
    ResponseCurve reference; // correct-key curve
    std::vector<SweepRow> rows;
};

// Correct key plus `wrong_keys` distinct random wrong keys (all of them when
// 2^p - 1 <= wrong_keys).
SweepResult wrong_key_sweep(const DecoyPlan& plan, int wrong_keys, uint64_t seed, int points = 512);

// Long format: key_id,omega,amplitude with key_id 0 first.
std::string sweep_to_csv(const DecoyPlan& plan, const SweepResult& sweep, int points = 512);

} // namespace tmcm
