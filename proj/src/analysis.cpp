#include "tmcm/analysis.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <sstream>

#include "tmcm/rng.hpp"

namespace tmcm {

double zero_phase_response(const std::vector<int64_t>& h, double omega) {
    const double center = 0.5 * double(h.size() - 1);
    double re = 0.0, im = 0.0;
    for (size_t j = 0; j < h.size(); ++j) {
        double phase = omega * (center - double(j));
        re += double(h[j]) * std::cos(phase);
        im += double(h[j]) * std::sin(phase);
    }
    (void)im; // zero for symmetric taps, discarded otherwise
    return re;
}

std::vector<int64_t> coefficients_under_key(const DecoyPlan& plan, const KeyAssignment& key) {
    std::vector<int64_t> h(plan.base.targets.size());
    for (size_t j = 0; j < h.size(); ++j) h[j] = plan.constant_for(key, int(j));
    return h;
}

ResponseCurve response_curve(const std::vector<int64_t>& h, int points) {
    ResponseCurve c;
    const double pi = std::acos(-1.0);
    for (int k = 0; k < points; ++k) {
        double w = pi * double(k) / double(points - 1);
        c.omega.push_back(w);
        c.amplitude.push_back(zero_phase_response(h, w));
    }
    return c;
}

DeviationMetrics deviation_metrics(const ResponseCurve& ref, const ResponseCurve& got) {
    DeviationMetrics m;
    if (ref.amplitude.size() != got.amplitude.size())
        throw std::invalid_argument("deviation_metrics: grid mismatch");
    double sum2 = 0.0;
    for (size_t k = 0; k < ref.amplitude.size(); ++k) {
        double d = std::fabs(got.amplitude[k] - ref.amplitude[k]);
        if (d > m.max_abs_dev) m.max_abs_dev = d;
        sum2 += d * d;
    }
    m.rms_dev = ref.amplitude.empty() ? 0.0 : std::sqrt(sum2 / double(ref.amplitude.size()));
    m.dc_value = got.amplitude.empty() ? 0.0 : got.amplitude.front();
    return m;
}

SweepResult wrong_key_sweep(const DecoyPlan& plan, int wrong_keys, uint64_t seed, int points) {
    SweepResult out;
    out.reference = response_curve(coefficients_under_key(plan, plan.correct_key), points);
    out.rows.push_back({0, plan.correct_key, deviation_metrics(out.reference, out.reference)});

    uint64_t correct = 0;
    for (int b = 0; b < plan.p; ++b)
        correct |= uint64_t(plan.correct_key.bits[size_t(b)]) << b;
    uint64_t space = uint64_t{1} << plan.p;
    std::set<uint64_t> chosen;
    Rng rng(seed);
    auto add_key = [&](uint64_t kv) {
        KeyAssignment key = plan.correct_key;
        for (int b = 0; b < plan.p; ++b) key.bits[size_t(b)] = uint8_t((kv >> b) & 1);
        ResponseCurve c = response_curve(coefficients_under_key(plan, key), points);
        out.rows.push_back({int(out.rows.size()), key, deviation_metrics(out.reference, c)});
    };
    if (space - 1 <= uint64_t(wrong_keys)) {
        for (uint64_t kv = 0; kv < space; ++kv)
            if (kv != correct) add_key(kv);
    } else {
        while (int(chosen.size()) < wrong_keys) {
            uint64_t kv = rng.below(space);
            if (kv == correct || !chosen.insert(kv).second) continue;
            add_key(kv);
        }
    }
    return out;
}

std::string sweep_to_csv(const DecoyPlan& plan, const SweepResult& sweep, int points) {
    std::ostringstream os;
    os.precision(12);
    os << "key_id,omega,amplitude\n";
    for (const SweepRow& row : sweep.rows) {
        ResponseCurve c = response_curve(coefficients_under_key(plan, row.key), points);
        for (size_t k = 0; k < c.omega.size(); ++k)
            os << row.key_id << ',' << c.omega[k] << ',' << c.amplitude[k] << '\n';
    }
    return os.str();
}

} // namespace tmcm
