#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tmcm/gatenet.hpp"
#include "tmcm/sat.hpp"
#include "tmcm/sim.hpp"

namespace tmcm {

// Tseitin encoding of a netlist. Net t maps to variable t + 1.
CNF tseitin_cnf(const GateNetlist& g);

// Two copies sharing data/select inputs, independent keys K1/K2, at least
// one output bit forced to differ. Variable layout documented in MiterVars.
struct MiterVars {
    std::vector<int> data, sel; // shared input variables
    std::vector<int> key1, key2;
    std::vector<int> out1, out2;
};

CNF build_miter(const GateNetlist& g, MiterVars* vars = nullptr);

enum class AttackStatus { KeyFound, Timeout, IterationLimit };

struct AttackLimits {
    double time_limit_s = 600.0;
    uint64_t dip_limit = 10000;
};

struct AttackResult {
    AttackStatus status = AttackStatus::IterationLimit;
    std::vector<uint8_t> key;
    uint64_t dip_count = 0;
    double wall_time_s = 0.0;
    SolverStats solver;

    std::string status_name() const;
};

// Oracle-guided attack: find a distinguishing input pattern, query the
// oracle, constrain both key copies to agree with it, repeat to UNSAT, then
// extract any key consistent with all observed I/O pairs.
AttackResult sat_attack(const GateNetlist& g, const Oracle& oracle,
                        const AttackLimits& limits = {}, std::ostream* log = nullptr);

struct LockedNetlist {
    GateNetlist netlist;
    std::vector<uint8_t> correct_key;
};

// RAND baseline: cut p random nets with XOR (key bit 0) or XNOR (key bit 1)
// key gates.
LockedNetlist lock_random(const GateNetlist& g, int p, uint64_t seed);

// True iff g under `key` matches the oracle; exhaustive when the data input
// is at most 8 bits wide, otherwise `samples` random vectors.
bool verify_recovered_key(const GateNetlist& g, const Oracle& oracle,
                          const std::vector<uint8_t>& key, int samples = 100000,
                          uint64_t seed = 1);

} // namespace tmcm
