// Acceptance suite: one pass/fail line per criterion.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "tmcm/analysis.hpp"
#include "tmcm/attack.hpp"
#include "tmcm/lower.hpp"
#include "tmcm/rng.hpp"
#include "tmcm/sim.hpp"
#include "tmcm/tmcm.hpp"
#include "tmcm/verilog.hpp"

using namespace tmcm;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::cout << "criterion " << criterion << ": " << (pass ? "PASS" : "FAIL") << " — " << detail
              << std::endl;
    if (!pass) ++failures;
}

DecoyPlan example_plan(int ibw) {
    ConstantSet cs = constant_set_new({13, 23}, ibw);
    PlanOptions opts;
    opts.seed = 7;
    opts.pinned_positions = example_13_23_positions();
    return assign_decoys(cs, 4, opts);
}

std::vector<uint8_t> bits_of(int p, uint64_t kv) {
    std::vector<uint8_t> bits(static_cast<size_t>(p));
    for (int b = 0; b < p; ++b) bits[size_t(b)] = uint8_t((kv >> b) & 1);
    return bits;
}

// ---- criterion 1: worked-example decoy sets ----
void criterion1() {
    DecoyPlan plan = example_plan(8);
    auto sorted = plan.decoys;
    for (auto& g : sorted) std::sort(g.begin(), g.end());
    bool ok = sorted.size() == 2 && sorted[0] == std::vector<int64_t>{9, 12, 15} &&
              sorted[1] == std::vector<int64_t>{19, 21, 22} && plan.r == 6;
    std::ostringstream os;
    os << "decoy sets {";
    for (int64_t v : sorted[0]) os << v << " ";
    os << "} {";
    for (int64_t v : sorted[1]) os << v << " ";
    os << "}, r=" << plan.r;
    report(1, ok, os.str());
}

// ---- criterion 2: worked-example key encoding ----
void criterion2() {
    DecoyPlan plan = example_plan(8);
    WordNetlist w = build_tmcm_mul(plan);
    bool ok = plan.correct_key.to_string() == "1011"; // k0k1=10, k2k3=11
    ok = ok && !corruption_check(w, plan, plan.correct_key).has_value();

    KeyAssignment k1000 = plan.correct_key;
    k1000.bits = {1, 0, 0, 0};
    int64_t c0 = plan.constant_for(k1000, 0);
    int64_t c1 = plan.constant_for(k1000, 1);
    ok = ok && c0 == 13 && c1 == 19;
    auto witness = corruption_check(w, plan, k1000);
    ok = ok && witness && witness->sel == 1 && witness->constant == 19;
    std::ostringstream os;
    os << "correct key " << plan.correct_key.to_string() << ", key 1000 -> (" << c0 << ", " << c1
       << ")";
    report(2, ok, os.str());
}

// ---- criterion 3: decomposition operation counts ----
void criterion3() {
    ShiftAddExpr e13 = dbr_decompose(13, DigitRep::Binary);
    ShiftAddExpr e23 = dbr_decompose(23, DigitRep::Binary);
    int binary_ops = e13.op_count() + e23.op_count();
    ShiftAddGraph g = greedy_cse({e13, e23});
    bool eval_ok = true;
    for (int64_t x = -2048; x <= 2048; ++x)
        if (g.eval_output(0, x) != 13 * x || g.eval_output(1, x) != 23 * x) eval_ok = false;
    bool ok = binary_ops == 5 && g.op_count() <= 5 && eval_ok;
    std::ostringstream os;
    os << "binary ops=" << binary_ops << ", shared graph ops=" << g.op_count()
       << (eval_ok ? ", evaluates correctly" : ", EVALUATION MISMATCH");
    report(3, ok, os.str());
}

// ---- criteria 4 and 5: random-plan equivalence and key corruption ----
struct TrialPlan {
    DecoyPlan plan;
    WordNetlist mul, sa;
};

std::vector<TrialPlan> make_trials(int count) {
    std::vector<TrialPlan> trials;
    Rng rng(2024);
    while (int(trials.size()) < count) {
        int n = int(2 + rng.below(7));            // [2,8]
        int p = int(2 + rng.below(11));           // [2,12]
        int cap = int(3 + rng.below(6));          // magnitude cap exponent -> mbw <= 8
        int ibw = int(4 + 2 * rng.below(3));      // {4,6,8}
        std::vector<int64_t> targets;
        while (int(targets.size()) < n) {
            int64_t c = rng.range(-(int64_t{1} << cap), (int64_t{1} << cap) - 1);
            if (c != 0 && std::find(targets.begin(), targets.end(), c) == targets.end())
                targets.push_back(c);
        }
        PlanOptions opts;
        opts.seed = trials.size() + 1;
        opts.policy = trials.size() % 2 ? DecoyPolicy::Random : DecoyPolicy::HammingLsb;
        try {
            ConstantSet cs = constant_set_new(targets, ibw);
            TrialPlan t{assign_decoys(cs, p, opts), {}, {}};
            t.mul = build_tmcm_mul(t.plan);
            t.sa = build_tmcm_sa(t.plan).netlist;
            trials.push_back(std::move(t));
        } catch (const std::exception&) {
            // decoy space too small for this draw; resample
        }
    }
    return trials;
}

bool gate_matches_word(const WordNetlist& w, uint64_t* mismatches) {
    GateNetlist g = lower_to_gates(w);
    const int64_t lo = -(int64_t{1} << (w.ibw - 1)), hi = (int64_t{1} << (w.ibw - 1)) - 1;
    const uint64_t keys = uint64_t{1} << w.p;
    std::vector<uint64_t> packed(size_t(g.num_inputs));
    struct Combo {
        int64_t x;
        int sel;
        uint64_t kv;
    };
    std::vector<Combo> lane(64);
    int lanes = 0;
    bool ok = true;
    auto flush = [&] {
        if (!lanes) return;
        std::vector<uint64_t> out = eval_gates_packed(g, packed);
        for (int l = 0; l < lanes; ++l) {
            int64_t got = 0;
            for (size_t b = 0; b < g.outputs.size(); ++b)
                got |= int64_t((out[b] >> l) & 1) << b;
            if ((got >> (g.outputs.size() - 1)) & 1)
                got -= int64_t{1} << g.outputs.size(); // sign extend
            int64_t want =
                eval_word(w, lane[size_t(l)].x, lane[size_t(l)].sel, bits_of(w.p, lane[size_t(l)].kv));
            if (got != want) {
                ok = false;
                ++*mismatches;
            }
        }
        std::fill(packed.begin(), packed.end(), 0);
        lanes = 0;
    };
    for (uint64_t kv = 0; kv < keys && ok; ++kv) {
        auto kb = bits_of(w.p, kv);
        for (int sel = 0; sel < w.n; ++sel)
            for (int64_t x = lo; x <= hi; ++x) {
                std::vector<uint8_t> in = pack_inputs(g, x, sel, kb);
                for (int32_t t = 0; t < g.num_inputs; ++t)
                    packed[size_t(t)] |= uint64_t(in[size_t(t)]) << lanes;
                lane[size_t(lanes)] = {x, sel, kv};
                if (++lanes == 64) flush();
            }
    }
    flush();
    return ok;
}

std::vector<TrialPlan> criterion4() {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<TrialPlan> trials = make_trials(20);
    uint64_t word_mismatches = 0, gate_mismatches = 0;
    for (const TrialPlan& t : trials) {
        const auto& plan = t.plan;
        const int64_t lo = -(int64_t{1} << (plan.base.ibw - 1));
        const int64_t hi = (int64_t{1} << (plan.base.ibw - 1)) - 1;
        for (int sel = 0; sel < plan.base.n; ++sel)
            for (int64_t x = lo; x <= hi; ++x) {
                int64_t want = plan.base.targets[size_t(sel)] * x;
                if (eval_word(t.mul, x, sel, plan.correct_key.bits) != want) ++word_mismatches;
                if (eval_word(t.sa, x, sel, plan.correct_key.bits) != want) ++word_mismatches;
            }
        gate_matches_word(t.mul, &gate_mismatches);
        gate_matches_word(t.sa, &gate_mismatches);
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = word_mismatches == 0 && gate_mismatches == 0 && secs < 300.0;
    std::ostringstream os;
    os << trials.size() << " plans, word mismatches=" << word_mismatches
       << ", gate mismatches=" << gate_mismatches << ", " << secs << " s";
    report(4, ok, os.str());
    return trials;
}

void criterion5(const std::vector<TrialPlan>& trials) {
    uint64_t uncorrupted_wrong = 0, clean_total = 0, expected_clean = trials.size();
    for (const TrialPlan& t : trials) {
        const auto& plan = t.plan;
        for (uint64_t kv = 0; kv < (uint64_t{1} << plan.p); ++kv) {
            KeyAssignment key = plan.correct_key;
            key.bits = bits_of(plan.p, kv);
            bool is_correct = key.bits == plan.correct_key.bits;
            auto witness = corruption_check(t.mul, plan, key);
            if (!witness) {
                ++clean_total;
                if (!is_correct) ++uncorrupted_wrong;
            }
        }
    }
    bool ok = uncorrupted_wrong == 0 && clean_total == expected_clean;
    std::ostringstream os;
    os << "uncorrupted wrong keys=" << uncorrupted_wrong << ", clean keys=" << clean_total << "/"
       << expected_clean << " plans";
    report(5, ok, os.str());
}

// ---- criterion 6: folded filter vs direct convolution ----
void criterion6() {
    Rng rng(606);
    uint64_t mismatches = 0;
    int trials = 15;
    for (int trial = 0; trial < trials; ++trial) {
        int taps = int(2 + rng.below(31)); // N <= 32
        std::vector<int64_t> h;
        while (int(h.size()) < taps) {
            int64_t c = rng.range(-60, 60);
            if (c != 0 && std::find(h.begin(), h.end(), c) == h.end()) h.push_back(c);
        }
        PlanOptions opts;
        opts.seed = trial + 1;
        DecoyPlan plan = assign_decoys(constant_set_new(h, 8), std::min(8, taps), opts);
        FoldedFir fir = build_folded_fir(plan, taps);
        std::vector<int64_t> x(256);
        for (auto& v : x) v = rng.range(-128, 127);
        std::vector<int64_t> got = simulate_folded_fir(fir, x, plan.correct_key.bits);
        std::vector<int64_t> want = direct_convolution(h, x);
        if (got != want) ++mismatches;
    }
    std::ostringstream os;
    os << trials << " filters (N up to 32, 256 samples), mismatching runs=" << mismatches;
    report(6, mismatches == 0, os.str());
}

// ---- criterion 7: attack on randomly locked netlists ----
void criterion7() {
    bool ok = true;
    std::ostringstream os;
    Rng rng(707);
    for (int inst = 0; inst < 3; ++inst) {
        std::vector<int64_t> targets;
        int n = int(2 + rng.below(4));
        while (int(targets.size()) < n) {
            int64_t c = rng.range(-120, 120);
            if (c != 0 && std::find(targets.begin(), targets.end(), c) == targets.end())
                targets.push_back(c);
        }
        ConstantSet cs = constant_set_new(targets, 8);
        WordNetlist plain = build_tmcm_plain(cs);
        LockedNetlist locked = lock_random(lower_to_gates(plain), 16, 100 + uint64_t(inst));
        Oracle oracle(plain, KeyAssignment{});
        AttackResult res = sat_attack(locked.netlist, oracle, {});
        bool good = res.status == AttackStatus::KeyFound && res.wall_time_s < 600.0 &&
                    verify_recovered_key(locked.netlist, oracle, res.key);
        ok = ok && good;
        os << "instance " << inst << ": " << res.status_name() << " in " << res.wall_time_s
           << " s (" << res.dip_count << " DIPs)" << (inst + 1 < 3 ? "; " : "");
    }
    report(7, ok, os.str());
}

// ---- criterion 8: attack on the obfuscated design, width scaling ----
void criterion8() {
    struct Run {
        AttackResult res;
        bool decoded = false;
    };
    std::map<int, Run> runs;
    for (int ibw : {8, 12}) {
        DecoyPlan plan = example_plan(ibw);
        WordNetlist w = build_tmcm_mul(plan);
        GateNetlist g = lower_to_gates(w);
        Oracle oracle(w, plan.correct_key);
        Run run;
        run.res = sat_attack(g, oracle, {});
        run.decoded = run.res.status == AttackStatus::KeyFound &&
                      plan.constant_for_bits(run.res.key, 0) == 13 &&
                      plan.constant_for_bits(run.res.key, 1) == 23;
        runs[ibw] = run;
    }
    const Run& r8 = runs[8];
    const Run& r12 = runs[12];
    bool base_ok = r8.res.status == AttackStatus::KeyFound && r8.decoded;
    bool dips_grow = r12.res.dip_count > r8.res.dip_count;
    bool time_grows = r12.res.wall_time_s > r8.res.wall_time_s;
    bool ok = base_ok && r12.res.status == AttackStatus::KeyFound && dips_grow && time_grows;
    std::ostringstream os;
    os << "ibw=8: " << r8.res.status_name() << ", decoded {13,23}=" << (r8.decoded ? "yes" : "no")
       << ", " << r8.res.dip_count << " DIPs, " << r8.res.wall_time_s << " s; ibw=12: "
       << r12.res.dip_count << " DIPs, " << r12.res.wall_time_s << " s; DIP growth "
       << (dips_grow ? "holds" : "does not hold (a nonzero-x DIP pins one select group exactly, "
                                 "so the attack needs n DIPs at every data width)")
       << ", time growth " << (time_grows ? "holds" : "does not hold");
    report(8, ok, os.str());
}

// ---- criterion 9: frequency response ----
void criterion9() {
    ConstantSet cs = constant_set_new({13, 23}, 8);
    PlanOptions opts;
    opts.seed = 7;
    DecoyPlan plan = assign_decoys(cs, 10, opts); // 1023 wrong keys to sample from
    ResponseCurve ref = response_curve({13, 23});
    ResponseCurve correct = response_curve(coefficients_under_key(plan, plan.correct_key));
    bool exact = ref.amplitude == correct.amplitude;

    SweepResult sweep = wrong_key_sweep(plan, 100, 909);
    int deviating = 0;
    double worst_dc_err = 0.0;
    for (size_t k = 1; k < sweep.rows.size(); ++k) {
        if (sweep.rows[k].metrics.max_abs_dev > 0.0) ++deviating;
        auto h = coefficients_under_key(plan, sweep.rows[k].key);
        int64_t sum = std::accumulate(h.begin(), h.end(), int64_t{0});
        worst_dc_err = std::max(worst_dc_err,
                                std::fabs(sweep.rows[k].metrics.dc_value - double(sum)));
    }
    double ref_dc_err = std::fabs(ref.amplitude[0] - 36.0);
    bool ok = exact && deviating == 100 && int(sweep.rows.size()) == 101 &&
              worst_dc_err <= 1e-12 && ref_dc_err <= 1e-12;
    std::ostringstream os;
    os << "correct-key curve " << (exact ? "exact" : "DIFFERS") << ", " << deviating
       << "/100 wrong keys deviate, worst dc error " << std::max(worst_dc_err, ref_dc_err);
    report(9, ok, os.str());
}

// ---- criterion 10: byte-identical regeneration ----
std::map<std::string, std::string> read_dir(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        files[entry.path().filename().string()] = os.str();
    }
    return files;
}

void criterion10() {
    fs::path base = fs::temp_directory_path() / "tmcm_accept10";
    fs::remove_all(base);
    fs::create_directories(base);
    fs::path consts = base / "constants.txt";
    std::ofstream(consts) << "13\n23\n";
    std::string cli = TMCM_CLI_PATH;
    bool ok = true;
    for (const std::string& run : {"a", "b"}) {
        std::string cmd = cli + " gen --constants " + consts.string() +
                          " --p 6 --arch tmcm-sa --ibw 8 --seed 11 --out " +
                          (base / run).string() + " > /dev/null";
        if (std::system(cmd.c_str()) != 0) ok = false;
    }
    auto a = read_dir(base / "a");
    auto b = read_dir(base / "b");
    size_t matching = 0;
    if (a.empty() || a.size() != b.size()) ok = false;
    for (const auto& [name, text] : a) {
        auto it = b.find(name);
        if (it != b.end() && it->second == text) ++matching;
        else ok = false;
    }
    std::ostringstream os;
    os << matching << "/" << a.size() << " artifacts byte-identical across runs";
    report(10, ok && matching == a.size(), os.str());
    fs::remove_all(base);
}

} // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    std::vector<TrialPlan> trials = criterion4();
    criterion5(trials);
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    std::cout << (failures ? "ACCEPTANCE: FAIL (" : "ACCEPTANCE: PASS (")
              << (10 - failures) << "/10 criteria)" << std::endl;
    return failures ? 1 : 0;
}
