#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tmcm/core.hpp"
#include "tmcm/rng.hpp"

namespace tmcm {

class Rng;

enum class DecoyPolicy { HammingLsb, Random };

std::string to_string(DecoyPolicy p);
DecoyPolicy decoy_policy_from_string(const std::string& s);

// k_0..k_{p-1}, grouped per target. Within a group the lowest key index is
// the MSB of the mux slot select.
struct KeyAssignment {
    std::vector<uint8_t> bits;
    std::vector<std::pair<int, int>> groups; // (offset, length) per target

    int group_value(int j) const;
    std::string to_string() const;
};

struct DecoyPlan {
    ConstantSet base;
    DecoyPolicy policy = DecoyPolicy::HammingLsb;
    std::vector<std::vector<int64_t>> decoys;    // per target, assignment order
    std::vector<int> key_bits;                   // q_j per target
    std::vector<std::vector<int64_t>> positions; // per target, slot -> constant
    std::vector<int> target_slot;                // slot of the target in its mux
    KeyAssignment correct_key;
    int p = 0;
    int64_t r = 0; // total decoy count
    uint64_t seed = 0;

    // Constant selected by `key` for target j (the target iff the group
    // matches the correct key).
    int64_t constant_for(const KeyAssignment& key, int j) const;
    int64_t constant_for_bits(const std::vector<uint8_t>& key_bits_flat, int j) const;

    std::string to_json() const;
    static DecoyPlan from_json(const std::string& text);
};

struct PlanOptions {
    DecoyPolicy policy = DecoyPolicy::HammingLsb;
    uint64_t seed = 0;
    // Explicit slot layouts (per target, slot -> constant); overrides the
    // seeded placement. Used to reproduce published examples.
    std::optional<std::vector<std::vector<int64_t>>> pinned_positions;
};

DecoyPlan assign_decoys(const ConstantSet& targets, int p, const PlanOptions& opts);

int64_t next_decoy_hamming(int64_t target, const std::set<int64_t>& used, int mbw);
int64_t next_decoy_random(int64_t target, const std::set<int64_t>& used, int mbw, Rng& rng);

KeyAssignment correct_key(const DecoyPlan& plan);

// Slot layout of the published worked example for {13,23}, p=4.
std::vector<std::vector<int64_t>> example_13_23_positions();

} // namespace tmcm
