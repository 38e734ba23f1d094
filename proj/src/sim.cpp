#include "tmcm/sim.hpp"

#include <deque>
#include <sstream>

#include "tmcm/rng.hpp"

namespace tmcm {

int64_t Oracle::query(int64_t x, int sel) const {
    queries_.fetch_add(1, std::memory_order_relaxed);
    return eval_word(design_, x, sel, key_.bits);
}

std::string VerifyReport::to_string() const {
    std::ostringstream os;
    if (pass) {
        os << "PASS (" << checked << " evaluations)";
    } else {
        os << "FAIL at x=" << witness_x << " i=" << witness_i << ": got " << got << ", expected "
           << expected;
    }
    return os.str();
}

VerifyReport verify_correct_key(const WordNetlist& design, const DecoyPlan& plan, int samples,
                                uint64_t seed) {
    VerifyReport rep;
    const ConstantSet& cs = plan.base;
    const auto& key = plan.correct_key.bits;
    int64_t lo = -(int64_t{1} << (cs.ibw - 1));
    int64_t hi = (int64_t{1} << (cs.ibw - 1)) - 1;

    auto check = [&](int64_t x, int i) {
        int64_t got = eval_word(design, x, i, key);
        ++rep.checked;
        if (got != cs.targets[size_t(i)] * x) {
            rep.witness_x = x;
            rep.witness_i = i;
            rep.got = got;
            rep.expected = cs.targets[size_t(i)] * x;
            return false;
        }
        return true;
    };

    if (cs.ibw <= 10) {
        for (int64_t x = lo; x <= hi; ++x)
            for (int i = 0; i < cs.n; ++i)
                if (!check(x, i)) return rep;
    } else {
        Rng rng(seed);
        for (int v = 0; v < samples; ++v)
            if (!check(rng.range(lo, hi), int(rng.below(uint64_t(cs.n))))) return rep;
    }
    rep.pass = true;
    return rep;
}

std::optional<CorruptionWitness> corruption_check(const WordNetlist& design, const DecoyPlan& plan,
                                                  const KeyAssignment& key) {
    // A group whose bits differ from the correct key selects a decoy for that
    // target; x = 1 exposes it. The claim is confirmed on the design itself.
    for (int j = 0; j < plan.base.n; ++j) {
        int64_t effective = plan.constant_for(key, j);
        if (effective == plan.base.targets[size_t(j)]) continue;
        CorruptionWitness w;
        w.sel = j;
        w.x = 1;
        w.constant = effective;
        int64_t got = eval_word(design, w.x, j, key.bits);
        if (got == plan.base.targets[size_t(j)] * w.x)
            throw std::runtime_error("corruption_check: design disagrees with plan decoding");
        return w;
    }
    return std::nullopt;
}

std::vector<int64_t> simulate_folded_fir(const FoldedFir& fir, const std::vector<int64_t>& x_stream,
                                         const std::vector<uint8_t>& key,
                                         std::vector<FirTraceRow>* trace) {
    const int N = fir.taps;
    std::deque<int64_t> chain(size_t(N > 1 ? N - 1 : 0), 0);
    std::vector<int64_t> out;
    uint64_t cycle = 0;
    for (int64_t x : x_stream) {
        for (int ts = 0; ts < N; ++ts) {
            int64_t tail = 0;
            if (N > 1) {
                tail = chain.front();
                chain.pop_front();
            }
            if (ts == N - 1) tail = 0; // counter wrap: chain value retired
            int64_t v = eval_word(fir.tmcm, x, ts, key) + tail;
            if (!fits_twos_complement(v, fir.acc_width))
                throw std::runtime_error("folded fir: accumulator overflow");
            if (N > 1) chain.push_back(v);
            FirTraceRow row;
            row.cycle = cycle++;
            row.x = x;
            row.sel = ts;
            if (ts == 0) {
                out.push_back(v);
                row.y = v;
            }
            if (trace) trace->push_back(row);
        }
    }
    return out;
}

std::string trace_to_csv(const std::vector<FirTraceRow>& trace) {
    std::ostringstream os;
    os << "cycle,x,i,y\n";
    for (const auto& row : trace) {
        os << row.cycle << "," << row.x << "," << row.sel << ",";
        if (row.y) os << *row.y;
        os << "\n";
    }
    return os.str();
}

std::vector<int64_t> direct_convolution(const std::vector<int64_t>& h,
                                        const std::vector<int64_t>& x) {
    std::vector<int64_t> y(x.size(), 0);
    for (size_t k = 0; k < x.size(); ++k)
        for (size_t j = 0; j < h.size() && j <= k; ++j) y[k] += h[j] * x[k - j];
    return y;
}

} // namespace tmcm
