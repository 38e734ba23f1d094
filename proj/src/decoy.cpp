#include "tmcm/decoy.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace tmcm {

std::string to_string(DecoyPolicy p) {
    return p == DecoyPolicy::HammingLsb ? "hamming-lsb" : "random";
}

DecoyPolicy decoy_policy_from_string(const std::string& s) {
    if (s == "hamming-lsb") return DecoyPolicy::HammingLsb;
    if (s == "random") return DecoyPolicy::Random;
    throw std::invalid_argument("unknown decoy policy: " + s);
}

int KeyAssignment::group_value(int j) const {
    auto [off, len] = groups[j];
    int v = 0;
    for (int b = 0; b < len; ++b) v = (v << 1) | bits[off + b];
    return v;
}

std::string KeyAssignment::to_string() const {
    std::string s;
    for (uint8_t b : bits) s += b ? '1' : '0';
    return s;
}

int64_t next_decoy_hamming(int64_t target, const std::set<int64_t>& used, int mbw) {
    // Candidates live in the width-(mbw+1) two's-complement field, which is
    // exactly the decoy range [-2^mbw, 2^mbw - 1]. Distance-d candidates are
    // enumerated by flipping bit subsets in lexicographic order, lowest bits
    // first.
    int w = mbw + 1;
    uint64_t mask = (uint64_t{1} << w) - 1;
    uint64_t tb = uint64_t(target) & mask;
    std::vector<int> idx;
    int64_t found = 0;
    bool have = false;

    auto try_subset = [&](uint64_t flip) {
        uint64_t cb = tb ^ flip;
        int64_t v = int64_t(cb);
        if (cb & (uint64_t{1} << (w - 1))) v -= int64_t{1} << w; // sign extend
        if (!used.count(v)) {
            found = v;
            have = true;
        }
        return have;
    };

    for (int d = 1; d <= w && !have; ++d) {
        // lexicographic d-combinations of bit positions 0..w-1
        idx.resize(d);
        for (int i = 0; i < d; ++i) idx[i] = i;
        while (true) {
            uint64_t flip = 0;
            for (int i : idx) flip |= uint64_t{1} << i;
            if (try_subset(flip)) break;
            int i = d - 1;
            while (i >= 0 && idx[i] == w - d + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int k = i + 1; k < d; ++k) idx[k] = idx[k - 1] + 1;
        }
    }
    if (!have) throw std::runtime_error("decoy space exhausted for target " + std::to_string(target));
    return found;
}

int64_t next_decoy_random(int64_t target, const std::set<int64_t>& used, int mbw, Rng& rng) {
    int64_t lo = -(int64_t{1} << mbw);
    int64_t hi = (int64_t{1} << mbw) - 1;
    for (int tries = 0; tries < 4096; ++tries) {
        int64_t v = rng.range(lo, hi);
        if (!used.count(v)) return v;
    }
    // Space nearly full: enumerate what is left.
    std::vector<int64_t> free;
    for (int64_t v = lo; v <= hi; ++v)
        if (!used.count(v)) free.push_back(v);
    if (free.empty())
        throw std::runtime_error("decoy space exhausted for target " + std::to_string(target));
    return free[rng.below(free.size())];
}

DecoyPlan assign_decoys(const ConstantSet& targets, int p, const PlanOptions& opts) {
    if (p < 1) throw std::invalid_argument("assign_decoys: p must be >= 1");
    const int n = targets.n;

    // Key budget per target: one bit per round, earlier targets first.
    std::vector<int> q(n, 0);
    {
        int nok = 0;
        while (nok != p) {
            for (int j = 0; j < n && nok != p; ++j) {
                ++q[j];
                ++nok;
            }
        }
    }
    int64_t r = 0;
    for (int j = 0; j < n; ++j) r += (int64_t{1} << q[j]) - 1;
    int64_t space = (int64_t{1} << (targets.mbw + 1)) - n;
    if (r > space)
        throw std::invalid_argument("assign_decoys: decoy range cannot hold " + std::to_string(r) +
                                    " unique decoys");

    DecoyPlan plan;
    plan.base = targets;
    plan.policy = opts.policy;
    plan.p = p;
    plan.r = r;
    plan.seed = opts.seed;
    plan.key_bits = q;
    plan.decoys.assign(n, {});

    Rng rng(opts.seed);
    std::set<int64_t> used(targets.targets.begin(), targets.targets.end());

    // Iterative assignment: round noi hands 2^noi fresh decoys to each
    // target still owed key bits.
    int nok = 0, noi = 0;
    while (nok != p) {
        int64_t nod = int64_t{1} << noi;
        for (int j = 0; j < n && nok != p; ++j) {
            for (int64_t d = 0; d < nod; ++d) {
                int64_t v = opts.policy == DecoyPolicy::HammingLsb
                                ? next_decoy_hamming(targets.targets[j], used, targets.mbw)
                                : next_decoy_random(targets.targets[j], used, targets.mbw, rng);
                used.insert(v);
                plan.decoys[j].push_back(v);
            }
            ++nok;
        }
        ++noi;
    }

    // Mux slot layout: target slot drawn from the plan RNG, decoys fill the
    // remaining slots in assignment order.
    plan.positions.assign(n, {});
    plan.target_slot.assign(n, 0);
    if (opts.pinned_positions) {
        const auto& pinned = *opts.pinned_positions;
        if (int(pinned.size()) != n) throw std::invalid_argument("pinned positions: wrong group count");
        for (int j = 0; j < n; ++j) {
            size_t slots = size_t{1} << q[j];
            if (pinned[j].size() != slots)
                throw std::invalid_argument("pinned positions: wrong slot count for group " +
                                            std::to_string(j));
            std::vector<int64_t> expect = plan.decoys[j];
            expect.push_back(targets.targets[j]);
            std::vector<int64_t> got = pinned[j];
            std::sort(expect.begin(), expect.end());
            std::sort(got.begin(), got.end());
            if (expect != got)
                throw std::invalid_argument("pinned positions: constants do not match group " +
                                            std::to_string(j));
            plan.positions[j] = pinned[j];
            auto it = std::find(pinned[j].begin(), pinned[j].end(), targets.targets[j]);
            plan.target_slot[j] = int(it - pinned[j].begin());
        }
    } else {
        for (int j = 0; j < n; ++j) {
            size_t slots = size_t{1} << q[j];
            plan.positions[j].assign(slots, 0);
            int ts = int(rng.below(slots));
            plan.target_slot[j] = ts;
            plan.positions[j][ts] = targets.targets[j];
            size_t s = 0;
            for (int64_t d : plan.decoys[j]) {
                while (int(s) == ts) ++s;
                plan.positions[j][s++] = d;
            }
        }
    }

    plan.correct_key = tmcm::correct_key(plan);
    return plan;
}

KeyAssignment correct_key(const DecoyPlan& plan) {
    KeyAssignment key;
    int off = 0;
    for (int j = 0; j < plan.base.n; ++j) {
        int len = plan.key_bits[j];
        key.groups.emplace_back(off, len);
        int slot = plan.target_slot[j];
        for (int b = len - 1; b >= 0; --b) key.bits.push_back(uint8_t((slot >> b) & 1));
        off += len;
    }
    return key;
}

int64_t DecoyPlan::constant_for(const KeyAssignment& key, int j) const {
    return positions[j][key.group_value(j)];
}

int64_t DecoyPlan::constant_for_bits(const std::vector<uint8_t>& flat, int j) const {
    KeyAssignment k;
    k.bits = flat;
    k.groups = correct_key.groups;
    return constant_for(k, j);
}

std::vector<std::vector<int64_t>> example_13_23_positions() {
    return {{15, 12, 13, 9}, {19, 22, 21, 23}};
}

std::string DecoyPlan::to_json() const {
    nlohmann::json j;
    j["targets"] = base.targets;
    j["n"] = base.n;
    j["m"] = base.m;
    j["mbw"] = base.mbw;
    j["ibw"] = base.ibw;
    j["policy"] = tmcm::to_string(policy);
    j["p"] = p;
    j["r"] = r;
    j["seed"] = seed;
    j["decoys"] = decoys;
    j["key_bits"] = key_bits;
    j["positions"] = positions;
    j["target_slot"] = target_slot;
    j["correct_key"] = correct_key.to_string();
    return j.dump(2) + "\n";
}

DecoyPlan DecoyPlan::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    DecoyPlan plan;
    plan.base = constant_set_new(j.at("targets").get<std::vector<int64_t>>(), j.at("ibw").get<int>());
    plan.policy = decoy_policy_from_string(j.at("policy").get<std::string>());
    plan.p = j.at("p").get<int>();
    plan.r = j.at("r").get<int64_t>();
    plan.seed = j.at("seed").get<uint64_t>();
    plan.decoys = j.at("decoys").get<std::vector<std::vector<int64_t>>>();
    plan.key_bits = j.at("key_bits").get<std::vector<int>>();
    plan.positions = j.at("positions").get<std::vector<std::vector<int64_t>>>();
    plan.target_slot = j.at("target_slot").get<std::vector<int>>();
    plan.correct_key = tmcm::correct_key(plan);
    std::string k = j.at("correct_key").get<std::string>();
    if (k != plan.correct_key.to_string())
        throw std::runtime_error("plan json: correct key does not match positions");
    return plan;
}

} // namespace tmcm
