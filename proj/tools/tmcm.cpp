#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tmcm/analysis.hpp"
#include "tmcm/attack.hpp"
#include "tmcm/decoy.hpp"
#include "tmcm/lower.hpp"
#include "tmcm/sim.hpp"
#include "tmcm/tmcm.hpp"
#include "tmcm/verilog.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tmcm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerifyFail = 2;
constexpr int kExitAttackTimeout = 3;

std::vector<int64_t> read_constants_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open constants file: " + path);
    std::vector<int64_t> out;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream is(line);
        int64_t v;
        if (is >> v) {
            std::string rest;
            if (is >> rest) throw std::runtime_error("bad constants line: " + line);
            out.push_back(v);
        } else if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) {
            throw std::runtime_error("bad constants line: " + line);
        }
    }
    return out;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

uint64_t seed_or_env(CLI::Option* opt, uint64_t seed) {
    if (opt->count()) return seed;
    if (const char* env = std::getenv("TMCM_SEED")) return std::stoull(env);
    return seed;
}

struct Design {
    DecoyPlan plan;
    std::string arch;
    WordNetlist word;
};

Design load_design(const std::string& dir) {
    Design d;
    d.plan = DecoyPlan::from_json(read_file(fs::path(dir) / "plan.json"));
    json st = json::parse(read_file(fs::path(dir) / "stats.json"));
    d.arch = st.at("arch").get<std::string>();
    d.word = d.arch == "tmcm-sa" ? build_tmcm_sa(d.plan).netlist : build_tmcm_mul(d.plan);
    return d;
}

// Hex string, MSB-first: "0x8" with p=4 means k0k1k2k3 = 1000.
KeyAssignment parse_key(const std::string& text, const DecoyPlan& plan) {
    if (text == "correct") return plan.correct_key;
    uint64_t v = std::stoull(text, nullptr, 0);
    if (plan.p < 64 && (v >> plan.p) != 0)
        throw std::runtime_error("key value wider than " + std::to_string(plan.p) + " bits");
    KeyAssignment key = plan.correct_key;
    for (int b = 0; b < plan.p; ++b)
        key.bits[size_t(b)] = uint8_t((v >> (plan.p - 1 - b)) & 1);
    return key;
}

int cmd_gen(const std::string& constants_path, int p, const std::string& arch,
            const std::string& policy, int ibw, uint64_t seed, const std::string& out_dir,
            bool pin_example) {
    ConstantSet cs = constant_set_new(read_constants_file(constants_path), ibw);
    PlanOptions opts;
    opts.policy = decoy_policy_from_string(policy);
    opts.seed = seed;
    if (pin_example) opts.pinned_positions = example_13_23_positions();
    DecoyPlan plan = assign_decoys(cs, p, opts);

    // Build everything in memory first so failures leave no partial output.
    WordNetlist word;
    json tables;
    if (arch == "tmcm-sa") {
        TmcmSa sa = build_tmcm_sa(plan);
        word = std::move(sa.netlist);
        tables["encoder"] = sa.encoder.to_text();
        tables["select"] = sa.select.to_text();
        tables["g_width"] = sa.encoder.g_width;
    } else {
        word = build_tmcm_mul(plan);
        json slots = json::array();
        for (const auto& pos : plan.positions) slots.push_back(pos);
        tables["slots"] = slots;
    }
    GateNetlist gates = lower_to_gates(word);
    GateStats gs = stats(gates);

    json st;
    st["arch"] = arch;
    st["ibw"] = ibw;
    st["mbw"] = cs.mbw;
    st["n"] = cs.n;
    st["p"] = p;
    st["r"] = plan.r;
    st["policy"] = policy;
    st["seed"] = seed;
    st["out_width"] = word.out_width;
    st["gate_count"] = gs.gate_count;
    st["depth"] = gs.depth;
    st["key_count"] = gs.key_count;
    st["plan_hash"] = plan_hash(plan);

    std::string design_v = emit_verilog(word);
    std::string tb_v = emit_testbench(word, plan, 10000);
    std::string bench = to_bench(gates);
    std::string plan_json = plan.to_json();

    fs::create_directories(out_dir);
    fs::path dir(out_dir);
    write_file(dir / "design.v", design_v);
    write_file(dir / "testbench.v", tb_v);
    write_file(dir / "plan.json", plan_json);
    write_file(dir / "tables.json", tables.dump(2) + "\n");
    write_file(dir / "netlist.bench", bench);
    write_file(dir / "stats.json", st.dump(2) + "\n");
    std::cout << "wrote " << out_dir << " (" << gs.gate_count << " gates, depth " << gs.depth
              << ", p=" << p << ", r=" << plan.r << ")\n";
    return kExitOk;
}

int cmd_sim(const std::string& dir, const std::string& key_text, const std::string& vectors,
            uint64_t seed) {
    Design d = load_design(dir);
    KeyAssignment key = parse_key(key_text, d.plan);

    bool exhaustive = vectors == "exhaustive" || d.plan.base.ibw <= 8;
    int64_t count = exhaustive ? 0 : std::stoll(vectors);
    Rng rng(seed);
    int64_t lo = -(int64_t{1} << (d.plan.base.ibw - 1));
    int64_t hi = (int64_t{1} << (d.plan.base.ibw - 1)) - 1;
    uint64_t checked = 0;
    auto check = [&](int64_t x, int sel) -> bool {
        ++checked;
        int64_t got = eval_word(d.word, x, sel, key.bits);
        int64_t expected = d.plan.base.targets[size_t(sel)] * x;
        if (got == expected) return true;
        std::cout << "FAIL after " << checked << " vectors: x=" << x << " i=" << sel
                  << " got " << got << " expected " << expected;
        if (auto w = corruption_check(d.word, d.plan, key))
            std::cout << " (key selects constant " << w->constant << " at i=" << w->sel << ")";
        std::cout << "\n";
        return false;
    };
    if (exhaustive) {
        for (int64_t x = lo; x <= hi; ++x)
            for (int sel = 0; sel < d.plan.base.n; ++sel)
                if (!check(x, sel)) return kExitVerifyFail;
    } else {
        for (int64_t v = 0; v < count; ++v)
            if (!check(rng.range(lo, hi), int(rng.below(uint64_t(d.plan.base.n)))))
                return kExitVerifyFail;
    }
    std::cout << "PASS: " << checked << " vectors, key " << key.to_string() << "\n";
    return kExitOk;
}

int cmd_attack(const std::string& dir, double time_limit, int dip_limit,
               const std::string& lock, int lock_p, uint64_t seed) {
    Design d = load_design(dir);

    GateNetlist target;
    std::vector<uint8_t> expected_key;
    if (lock == "rand") {
        WordNetlist plain = build_tmcm_plain(d.plan.base);
        LockedNetlist locked = lock_random(lower_to_gates(plain), lock_p, seed);
        target = std::move(locked.netlist);
        expected_key = std::move(locked.correct_key);
        // The oracle is the unlocked function.
        d.word = std::move(plain);
    } else if (!lock.empty()) {
        throw CLI::ValidationError("--lock", "unknown scheme: " + lock);
    } else {
        target = from_bench(read_file(fs::path(dir) / "netlist.bench"));
        for (int b = 0; b < d.plan.p; ++b)
            expected_key.push_back(d.plan.correct_key.bits[size_t(b)]);
    }
    Oracle locked_oracle(d.word, lock == "rand" ? KeyAssignment{} : d.plan.correct_key);

    AttackLimits limits;
    limits.time_limit_s = time_limit;
    limits.dip_limit = dip_limit;
    std::ofstream log(fs::path(dir) / "attack.log");
    AttackResult res = sat_attack(target, locked_oracle, limits, &log);

    json rj;
    rj["status"] = res.status_name();
    rj["dip_count"] = res.dip_count;
    rj["wall_time_s"] = res.wall_time_s;
    rj["oracle_queries"] = locked_oracle.query_count();
    if (res.status == AttackStatus::KeyFound) {
        std::string bits;
        for (uint8_t b : res.key) bits += char('0' + b);
        rj["key"] = bits;
        rj["key_verified"] = verify_recovered_key(target, locked_oracle, res.key);
        if (lock.empty()) {
            std::vector<int64_t> consts;
            for (int j = 0; j < int(d.plan.base.targets.size()); ++j)
                consts.push_back(d.plan.constant_for_bits(res.key, j));
            rj["decoded_constants"] = consts;
        }
    }
    write_file(fs::path(dir) / "attack_result.json", rj.dump(2) + "\n");
    std::cout << rj.dump(2) << "\n";
    return res.status == AttackStatus::KeyFound ? kExitOk : kExitAttackTimeout;
}

int cmd_analyze(const std::string& dir, int wrong_keys, uint64_t seed) {
    Design d = load_design(dir);
    uint64_t population = d.plan.p >= 63 ? ~uint64_t{0} : (uint64_t{1} << d.plan.p) - 1;
    if (uint64_t(wrong_keys) > population)
        throw CLI::ValidationError("--wrong-keys", "exceeds wrong-key population");
    SweepResult sweep = wrong_key_sweep(d.plan, wrong_keys, seed);
    write_file(fs::path(dir) / "response.csv", sweep_to_csv(d.plan, sweep));

    json mj = json::array();
    for (const SweepRow& row : sweep.rows) {
        json r;
        r["key_id"] = row.key_id;
        r["key"] = row.key.to_string();
        r["max_abs_dev"] = row.metrics.max_abs_dev;
        r["rms_dev"] = row.metrics.rms_dev;
        r["dc_value"] = row.metrics.dc_value;
        mj.push_back(r);
    }
    write_file(fs::path(dir) / "metrics.json", mj.dump(2) + "\n");
    std::cout << "wrote response.csv and metrics.json (" << sweep.rows.size() << " series)\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"TMCM constant-obfuscation toolkit"};
    app.require_subcommand(1);

    std::string constants, arch = "tmcm-mul", policy = "hamming-lsb", out_dir = "out";
    std::string key_text = "correct", vectors = "10000", lock;
    int p = 2, ibw = 8, dip_limit = 10000, wrong_keys = 100, lock_p = 16;
    double time_limit = 600.0;
    uint64_t seed = 1;
    bool pin_example = false;

    auto* gen = app.add_subcommand("gen", "generate an obfuscated design");
    gen->add_option("--constants", constants, "file with one signed decimal per line")->required();
    gen->add_option("--p", p, "number of key bits");
    gen->add_option("--arch", arch)->check(CLI::IsMember({"tmcm-mul", "tmcm-sa"}));
    gen->add_option("--policy", policy)->check(CLI::IsMember({"hamming-lsb", "random"}));
    gen->add_option("--ibw", ibw, "data input bit-width");
    auto* gseed = gen->add_option("--seed", seed);
    gen->add_option("--out", out_dir, "output directory");
    gen->add_flag("--pin-example", pin_example, "use the published {13,23} slot layout");

    auto* sim = app.add_subcommand("sim", "simulate a generated design");
    sim->add_option("--out", out_dir, "design directory")->required();
    sim->add_option("--key", key_text, "hex key or 'correct'");
    sim->add_option("--vectors", vectors, "count or 'exhaustive'");
    auto* sseed = sim->add_option("--seed", seed);

    auto* atk = app.add_subcommand("attack", "oracle-guided key recovery");
    atk->add_option("--out", out_dir, "design directory")->required();
    atk->add_option("--time-limit", time_limit, "seconds");
    atk->add_option("--dip-limit", dip_limit);
    atk->add_option("--lock", lock, "lock a plain netlist first (scheme: rand)");
    atk->add_option("--p", lock_p, "key bits for --lock");
    auto* aseed = atk->add_option("--seed", seed);

    auto* ana = app.add_subcommand("analyze", "frequency-response key sweep");
    ana->add_option("--out", out_dir, "design directory")->required();
    ana->add_option("--wrong-keys", wrong_keys);
    auto* nseed = ana->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed())
            return cmd_gen(constants, p, arch, policy, ibw, seed_or_env(gseed, seed), out_dir,
                           pin_example);
        if (sim->parsed()) return cmd_sim(out_dir, key_text, vectors, seed_or_env(sseed, seed));
        if (atk->parsed())
            return cmd_attack(out_dir, time_limit, dip_limit, lock, lock_p,
                              seed_or_env(aseed, seed));
        if (ana->parsed()) return cmd_analyze(out_dir, wrong_keys, seed_or_env(nseed, seed));
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
