#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "tmcm/attack.hpp"
#include "tmcm/lower.hpp"
#include "tmcm/rng.hpp"
#include "tmcm/tmcm.hpp"

using namespace tmcm;

static DecoyPlan example_plan(int ibw = 8) {
    ConstantSet cs = constant_set_new({13, 23}, ibw);
    PlanOptions opts;
    opts.seed = 7;
    opts.pinned_positions = example_13_23_positions();
    return assign_decoys(cs, 4, opts);
}

TEST_CASE("tseitin encoding matches circuit evaluation") {
    DecoyPlan plan = example_plan(4);
    GateNetlist g = lower_to_gates(build_tmcm_mul(plan));
    CNF cnf = tseitin_cnf(g);
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        int64_t x = rng.range(-8, 7);
        int sel = int(rng.below(2));
        std::vector<uint8_t> key(4);
        for (auto& b : key) b = uint8_t(rng.below(2));
        std::vector<uint8_t> in = pack_inputs(g, x, sel, key);
        std::vector<uint8_t> out = eval_gates(g, in);

        Solver s;
        for (int v = 0; v < cnf.num_vars; ++v) s.new_var();
        for (const auto& cl : cnf.clauses) s.add_clause(cl);
        std::vector<int> assume;
        for (int32_t t = 0; t < g.num_inputs; ++t)
            assume.push_back(in[size_t(t)] ? t + 1 : -(t + 1)); // var = net + 1
        REQUIRE(s.solve(assume) == SatStatus::Sat);
        for (size_t b = 0; b < g.outputs.size(); ++b)
            CHECK(s.value(g.outputs[b] + 1) == (out[b] != 0));
    }
}

TEST_CASE("miter is sat iff a distinguishing input exists") {
    DecoyPlan plan = example_plan(4);
    GateNetlist g = lower_to_gates(build_tmcm_mul(plan));
    MiterVars mv;
    CNF cnf = build_miter(g, &mv);
    Solver s;
    for (int v = 0; v < cnf.num_vars; ++v) s.new_var();
    for (const auto& cl : cnf.clauses) s.add_clause(cl);
    // wrong keys exist, so some pair of keys disagrees somewhere
    CHECK(s.solve() == SatStatus::Sat);
    // forcing both key copies equal kills every difference
    std::vector<int> assume;
    for (size_t b = 0; b < mv.key1.size(); ++b) {
        int kb = plan.correct_key.bits[b];
        assume.push_back(kb ? mv.key1[b] : -mv.key1[b]);
        assume.push_back(kb ? mv.key2[b] : -mv.key2[b]);
    }
    CHECK(s.solve(assume) == SatStatus::Unsat);
}

TEST_CASE("attack recovers the obfuscation key") {
    DecoyPlan plan = example_plan(8);
    WordNetlist word = build_tmcm_mul(plan);
    GateNetlist g = lower_to_gates(word);
    Oracle oracle(word, plan.correct_key);
    std::ostringstream log;
    AttackResult res = sat_attack(g, oracle, {}, &log);
    REQUIRE(res.status == AttackStatus::KeyFound);
    CHECK(verify_recovered_key(g, oracle, res.key));
    // recovered key decodes to the target constants
    CHECK(plan.constant_for_bits(res.key, 0) == 13);
    CHECK(plan.constant_for_bits(res.key, 1) == 23);
    CHECK(res.dip_count > 0);
    CHECK(log.str().find("\"oracle\"") != std::string::npos);
}

TEST_CASE("attack breaks the shift-add architecture too") {
    DecoyPlan plan = example_plan(8);
    WordNetlist word = build_tmcm_sa(plan).netlist;
    GateNetlist g = lower_to_gates(word);
    Oracle oracle(word, plan.correct_key);
    AttackResult res = sat_attack(g, oracle, {});
    REQUIRE(res.status == AttackStatus::KeyFound);
    CHECK(plan.constant_for_bits(res.key, 0) == 13);
    CHECK(plan.constant_for_bits(res.key, 1) == 23);
}

TEST_CASE("random locking round trip") {
    ConstantSet cs = constant_set_new({13, 23}, 8);
    WordNetlist plain = build_tmcm_plain(cs);
    GateNetlist g = lower_to_gates(plain);
    LockedNetlist locked = lock_random(g, 8, 5);
    CHECK(locked.netlist.key_bits.size() == 8);
    CHECK(locked.correct_key.size() == 8);
    // correct key restores the original function
    for (int64_t x = -128; x < 128; x += 3)
        for (int sel = 0; sel < 2; ++sel) {
            auto in = pack_inputs(locked.netlist, x, sel, locked.correct_key);
            int64_t got = unpack_output(locked.netlist, eval_gates(locked.netlist, in));
            CHECK(got == cs.targets[size_t(sel)] * x);
        }
    Oracle oracle(plain, KeyAssignment{});
    AttackResult res = sat_attack(locked.netlist, oracle, {});
    REQUIRE(res.status == AttackStatus::KeyFound);
    CHECK(verify_recovered_key(locked.netlist, oracle, res.key));
}

TEST_CASE("limits are honored") {
    DecoyPlan plan = example_plan(8);
    WordNetlist word = build_tmcm_mul(plan);
    GateNetlist g = lower_to_gates(word);
    Oracle oracle(word, plan.correct_key);

    AttackLimits tiny_iters;
    tiny_iters.dip_limit = 0;
    CHECK(sat_attack(g, oracle, tiny_iters).status == AttackStatus::IterationLimit);

    AttackLimits no_time;
    no_time.time_limit_s = 0.0;
    CHECK(sat_attack(g, oracle, no_time).status == AttackStatus::Timeout);
}

TEST_CASE("locking determinism") {
    ConstantSet cs = constant_set_new({7, 11, -9}, 6);
    GateNetlist g = lower_to_gates(build_tmcm_plain(cs));
    LockedNetlist a = lock_random(g, 6, 42);
    LockedNetlist b = lock_random(g, 6, 42);
    CHECK(a.correct_key == b.correct_key);
    CHECK(to_bench(a.netlist) == to_bench(b.netlist));
}
