#include "tmcm/attack.hpp"

#include <chrono>
#include <ostream>
#include <stdexcept>

#include "tmcm/rng.hpp"

namespace tmcm {

namespace {

struct ClauseSink {
    virtual ~ClauseSink() = default;
    virtual int new_var() = 0;
    virtual void add(std::vector<int> clause) = 0;
};

struct CnfSink : ClauseSink {
    CNF& cnf;
    explicit CnfSink(CNF& c) : cnf(c) {}
    int new_var() override { return cnf.new_var(); }
    void add(std::vector<int> clause) override { cnf.add(std::move(clause)); }
};

struct SolverSink : ClauseSink {
    Solver& solver;
    explicit SolverSink(Solver& s) : solver(s) {}
    int new_var() override { return solver.new_var(); }
    void add(std::vector<int> clause) override { solver.add_clause(clause); }
};

void gate_clauses(ClauseSink& sink, GKind kind, int y, int a, int b) {
    switch (kind) {
    case GKind::And:
        sink.add({-y, a});
        sink.add({-y, b});
        sink.add({y, -a, -b});
        break;
    case GKind::Or:
        sink.add({y, -a});
        sink.add({y, -b});
        sink.add({-y, a, b});
        break;
    case GKind::Xor:
        sink.add({-y, a, b});
        sink.add({-y, -a, -b});
        sink.add({y, -a, b});
        sink.add({y, a, -b});
        break;
    case GKind::Not:
        sink.add({y, a});
        sink.add({-y, -a});
        break;
    case GKind::Nand:
        sink.add({y, a});
        sink.add({y, b});
        sink.add({-y, -a, -b});
        break;
    case GKind::Nor:
        sink.add({-y, -a});
        sink.add({-y, -b});
        sink.add({y, a, b});
        break;
    }
}

struct CopyVars {
    std::vector<int> data, sel, key, out;
};

// Instantiates one circuit copy; input variable vectors may be shared with
// other copies, gate variables are always fresh.
CopyVars encode_copy(ClauseSink& sink, const GateNetlist& g, const std::vector<int>& data,
                     const std::vector<int>& sel, const std::vector<int>& key) {
    CopyVars cv;
    cv.data = data;
    cv.sel = sel;
    cv.key = key;
    std::vector<int> var_of(size_t(g.net_count()), 0);
    for (size_t b = 0; b < g.data_bits.size(); ++b) var_of[size_t(g.data_bits[b])] = data[b];
    for (size_t b = 0; b < g.sel_bits.size(); ++b) var_of[size_t(g.sel_bits[b])] = sel[b];
    for (size_t b = 0; b < g.key_bits.size(); ++b) var_of[size_t(g.key_bits[b])] = key[b];
    for (size_t i = 0; i < g.gates.size(); ++i) {
        const Gate& gt = g.gates[i];
        int y = sink.new_var();
        var_of[size_t(g.num_inputs) + i] = y;
        gate_clauses(sink, gt.kind, y, var_of[size_t(gt.a)],
                     gt.kind == GKind::Not ? 0 : var_of[size_t(gt.b)]);
    }
    for (int32_t o : g.outputs) cv.out.push_back(var_of[size_t(o)]);
    return cv;
}

std::vector<int> fresh_vars(ClauseSink& sink, size_t count) {
    std::vector<int> v(count);
    for (auto& x : v) x = sink.new_var();
    return v;
}

// Exclude select patterns outside the functional range [0, n).
void constrain_select_range(ClauseSink& sink, const std::vector<int>& sel, int n) {
    if (sel.empty()) return;
    for (int v = n; v < (1 << sel.size()); ++v) {
        std::vector<int> clause;
        for (size_t b = 0; b < sel.size(); ++b)
            clause.push_back((v >> b) & 1 ? -sel[b] : sel[b]);
        sink.add(std::move(clause));
    }
}

void add_io_constraint(ClauseSink& sink, const GateNetlist& g, const std::vector<int>& key,
                       int64_t x, int sel_val, int64_t y) {
    auto data = fresh_vars(sink, g.data_bits.size());
    auto sel = fresh_vars(sink, g.sel_bits.size());
    for (size_t b = 0; b < data.size(); ++b) sink.add({(x >> b) & 1 ? data[b] : -data[b]});
    for (size_t b = 0; b < sel.size(); ++b) sink.add({(sel_val >> b) & 1 ? sel[b] : -sel[b]});
    CopyVars cv = encode_copy(sink, g, data, sel, key);
    for (size_t b = 0; b < cv.out.size(); ++b)
        sink.add({(uint64_t(y) >> b) & 1 ? cv.out[b] : -cv.out[b]});
}

} // namespace

CNF tseitin_cnf(const GateNetlist& g) {
    CNF cnf;
    CnfSink sink(cnf);
    for (int32_t t = 0; t < g.num_inputs; ++t) sink.new_var(); // var = net + 1
    std::vector<int> data, sel, key;
    for (int32_t b : g.data_bits) data.push_back(b + 1);
    for (int32_t b : g.sel_bits) sel.push_back(b + 1);
    for (int32_t b : g.key_bits) key.push_back(b + 1);
    encode_copy(sink, g, data, sel, key);
    return cnf;
}

CNF build_miter(const GateNetlist& g, MiterVars* vars) {
    if (g.key_bits.empty()) throw std::invalid_argument("build_miter: netlist has no key inputs");
    CNF cnf;
    CnfSink sink(cnf);
    MiterVars mv;
    mv.data = fresh_vars(sink, g.data_bits.size());
    mv.sel = fresh_vars(sink, g.sel_bits.size());
    mv.key1 = fresh_vars(sink, g.key_bits.size());
    mv.key2 = fresh_vars(sink, g.key_bits.size());
    CopyVars c1 = encode_copy(sink, g, mv.data, mv.sel, mv.key1);
    CopyVars c2 = encode_copy(sink, g, mv.data, mv.sel, mv.key2);
    mv.out1 = c1.out;
    mv.out2 = c2.out;
    std::vector<int> diff;
    for (size_t b = 0; b < c1.out.size(); ++b) {
        int d = sink.new_var();
        gate_clauses(sink, GKind::Xor, d, c1.out[b], c2.out[b]);
        diff.push_back(d);
    }
    cnf.add(diff); // at least one output bit differs
    if (vars) *vars = mv;
    return cnf;
}

std::string AttackResult::status_name() const {
    switch (status) {
    case AttackStatus::KeyFound: return "KeyFound";
    case AttackStatus::Timeout: return "Timeout";
    case AttackStatus::IterationLimit: return "IterationLimit";
    }
    return "?";
}

AttackResult sat_attack(const GateNetlist& g, const Oracle& oracle, const AttackLimits& limits,
                        std::ostream* log) {
    AttackResult res;
    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    const int p = int(g.key_bits.size());
    if (p == 0) {
        res.status = AttackStatus::KeyFound;
        return res;
    }
    const int n = oracle.select_count();
    const size_t ow = g.outputs.size();

    // Miter solver for DIP search; a second solver accumulates only the I/O
    // constraints for final key extraction.
    Solver miter;
    SolverSink msink(miter);
    std::vector<int> mdata = fresh_vars(msink, g.data_bits.size());
    std::vector<int> msel = fresh_vars(msink, g.sel_bits.size());
    std::vector<int> mkey1 = fresh_vars(msink, size_t(p));
    std::vector<int> mkey2 = fresh_vars(msink, size_t(p));
    CopyVars c1 = encode_copy(msink, g, mdata, msel, mkey1);
    CopyVars c2 = encode_copy(msink, g, mdata, msel, mkey2);
    std::vector<int> diff;
    for (size_t b = 0; b < ow; ++b) {
        int d = msink.new_var();
        gate_clauses(msink, GKind::Xor, d, c1.out[b], c2.out[b]);
        diff.push_back(d);
    }
    msink.add(diff);
    constrain_select_range(msink, msel, n);

    Solver extract;
    SolverSink esink(extract);
    std::vector<int> ekey = fresh_vars(esink, size_t(p));

    bool timed_out = false;
    auto timed_solve = [&](Solver& s) {
        // bounded slices so the wall-clock limit also interrupts long solves
        while (true) {
            if (elapsed() > limits.time_limit_s) {
                timed_out = true;
                return SatStatus::Limit;
            }
            SatStatus st = s.solve({}, 4096);
            if (st != SatStatus::Limit) return st;
        }
    };

    while (true) {
        SatStatus st = timed_solve(miter);
        res.solver = miter.stats();
        if (timed_out) {
            res.status = AttackStatus::Timeout;
            break;
        }
        if (st == SatStatus::Unsat) {
            // No distinguishing pattern remains; any key consistent with the
            // observed I/O is functionally equivalent to the correct one.
            SatStatus est = extract.solve();
            if (est != SatStatus::Sat)
                throw std::runtime_error("sat_attack: extraction UNSAT (oracle/netlist mismatch)");
            for (int b = 0; b < p; ++b) res.key.push_back(extract.value(ekey[size_t(b)]));
            res.status = AttackStatus::KeyFound;
            break;
        }
        if (res.dip_count >= limits.dip_limit) {
            res.status = AttackStatus::IterationLimit;
            break;
        }

        // Distinguishing input pattern from the model.
        int64_t x = 0;
        for (size_t b = 0; b < mdata.size(); ++b)
            if (miter.value(mdata[b])) x |= int64_t{1} << b;
        if (!mdata.empty() && miter.value(mdata.back()))
            x -= int64_t{1} << mdata.size(); // two's complement
        int sel_val = 0;
        for (size_t b = 0; b < msel.size(); ++b)
            if (miter.value(msel[b])) sel_val |= 1 << b;

        int64_t y = oracle.query(x, sel_val);
        ++res.dip_count;
        if (log)
            *log << "{\"iter\":" << res.dip_count << ",\"x\":" << x << ",\"i\":" << sel_val
                 << ",\"oracle\":" << y << ",\"elapsed_s\":" << elapsed() << "}\n";

        // Both key copies must reproduce the oracle on this DIP.
        add_io_constraint(msink, g, mkey1, x, sel_val, y);
        add_io_constraint(msink, g, mkey2, x, sel_val, y);
        add_io_constraint(esink, g, ekey, x, sel_val, y);
    }
    res.wall_time_s = elapsed();
    return res;
}

LockedNetlist lock_random(const GateNetlist& g, int p, uint64_t seed) {
    if (p == 0) return {g, {}};
    // Eligible cut points: nets consumed by a gate or driving an output.
    std::vector<uint8_t> used(size_t(g.net_count()), 0);
    for (const Gate& gt : g.gates) {
        used[size_t(gt.a)] = 1;
        if (gt.kind != GKind::Not) used[size_t(gt.b)] = 1;
    }
    for (int32_t o : g.outputs) used[size_t(o)] = 1;
    std::vector<int32_t> eligible;
    for (int32_t t = 0; t < g.net_count(); ++t)
        if (used[size_t(t)]) eligible.push_back(t);
    if (int(eligible.size()) < p)
        throw std::invalid_argument("lock_random: not enough nets to cut");

    Rng rng(seed);
    std::vector<int32_t> cuts;
    std::vector<uint8_t> cut_flag(size_t(g.net_count()), 0);
    while (int(cuts.size()) < p) {
        int32_t t = eligible[size_t(rng.below(eligible.size()))];
        if (cut_flag[size_t(t)]) continue;
        cut_flag[size_t(t)] = 1;
        cuts.push_back(t);
    }

    LockedNetlist out;
    GateNetlist& ng = out.netlist;
    ng.num_inputs = g.num_inputs + p;
    ng.data_bits = g.data_bits;
    ng.sel_bits = g.sel_bits;
    ng.key_bits = g.key_bits;
    std::vector<int32_t> key_net(size_t(g.net_count()), -1);
    std::vector<int> key_index(size_t(g.net_count()), -1);
    for (int b = 0; b < p; ++b) ng.key_bits.push_back(g.num_inputs + b);
    out.correct_key.resize(size_t(p));
    {
        int b = 0;
        for (int32_t t : cuts) {
            key_net[size_t(t)] = g.num_inputs + b;
            key_index[size_t(t)] = b;
            out.correct_key[size_t(b)] = uint8_t(rng.below(2)); // XNOR when 1
            ++b;
        }
    }

    std::vector<int32_t> cur(size_t(g.net_count()), -1);
    auto insert_key_gate = [&](int32_t old_net, int32_t driver) {
        int32_t x = ng.add_gate(GKind::Xor, driver, key_net[size_t(old_net)]);
        if (out.correct_key[size_t(key_index[size_t(old_net)])]) x = ng.add_gate(GKind::Not, x);
        cur[size_t(old_net)] = x;
    };
    for (int32_t t = 0; t < g.num_inputs; ++t) {
        cur[size_t(t)] = t;
        if (cut_flag[size_t(t)]) insert_key_gate(t, t);
    }
    for (size_t i = 0; i < g.gates.size(); ++i) {
        const Gate& gt = g.gates[i];
        int32_t old_id = g.num_inputs + int32_t(i);
        int32_t id = ng.add_gate(gt.kind, cur[size_t(gt.a)],
                                 gt.kind == GKind::Not ? 0 : cur[size_t(gt.b)]);
        cur[size_t(old_id)] = id;
        if (cut_flag[size_t(old_id)]) insert_key_gate(old_id, id);
    }
    for (int32_t o : g.outputs) ng.outputs.push_back(cur[size_t(o)]);
    return out;
}

bool verify_recovered_key(const GateNetlist& g, const Oracle& oracle,
                          const std::vector<uint8_t>& key, int samples, uint64_t seed) {
    const int ibw = int(g.data_bits.size());
    const int n = oracle.select_count();
    auto check = [&](int64_t x, int sel) {
        auto in = pack_inputs(g, x, sel, key);
        int64_t got = unpack_output(g, eval_gates(g, in));
        return got == oracle.query(x, sel);
    };
    int64_t lo = -(int64_t{1} << (ibw - 1));
    int64_t hi = (int64_t{1} << (ibw - 1)) - 1;
    if (ibw <= 8) {
        for (int64_t x = lo; x <= hi; ++x)
            for (int sel = 0; sel < n; ++sel)
                if (!check(x, sel)) return false;
        return true;
    }
    Rng rng(seed);
    for (int v = 0; v < samples; ++v)
        if (!check(rng.range(lo, hi), int(rng.below(uint64_t(n))))) return false;
    return true;
}

} // namespace tmcm
