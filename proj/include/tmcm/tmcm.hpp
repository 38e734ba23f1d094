#pragma once

#include <cstdint>
#include <vector>

#include "tmcm/core.hpp"
#include "tmcm/decoy.hpp"
#include "tmcm/wordir.hpp"

namespace tmcm {

enum class DigitRep { Binary, Csd };

// Decomposition of one constant multiplication into signed shifted copies of
// the input: c*x = sum of sign * (x << shift).
struct ShiftAddTerm {
    bool negative = false;
    int shift = 0;
};

struct ShiftAddExpr {
    int64_t constant = 0;
    std::vector<ShiftAddTerm> terms;

    int op_count() const { return int(terms.size()) - 1; }
};

ShiftAddExpr dbr_decompose(int64_t c, DigitRep rep);

// Shared shift-add DAG produced by greedy common-subexpression extraction.
// ref < 0 is the input x, otherwise an index into nodes.
struct SaRef {
    int node = -1; // -1 = x
    bool negative = false;
    int shift = 0;
};

struct SaNode {
    SaRef lhs, rhs; // value = lhs + rhs
    int64_t value = 0; // as a multiple of x
};

struct ShiftAddGraph {
    std::vector<SaNode> nodes;
    std::vector<SaRef> outputs; // one per requested constant
    std::vector<int64_t> constants;

    int op_count() const;
    int64_t eval_output(size_t idx, int64_t x) const;
};

ShiftAddGraph greedy_cse(const std::vector<ShiftAddExpr>& exprs);

// Global order of target and decoy constants: per-target slot order,
// concatenated in target order.
std::vector<int64_t> global_order(const DecoyPlan& plan);

EncoderTable build_encoder_table(const DecoyPlan& plan);

// Key-selected constant muxes feeding a select mux and a signed multiplier.
WordNetlist build_tmcm_mul(const DecoyPlan& plan);

// Unobfuscated mux-mul design over targets only; no key inputs. Baseline for
// gate-level logic locking experiments.
WordNetlist build_tmcm_plain(const ConstantSet& cs);

struct TmcmSa {
    WordNetlist netlist;
    EncoderTable encoder;
    SelectTable select;
};

// Multiplierless datapath: a base shifted operand followed by cascaded
// adder/subtractor stages, driven by encoder + select tables.
TmcmSa build_tmcm_sa(const DecoyPlan& plan, DigitRep rep = DigitRep::Csd);

// Fully folded FIR filter: an obfuscated TMCM core reused over N clock
// cycles, with an (N-1)-deep register chain carrying partial sums.
struct FoldedFir {
    WordNetlist tmcm;
    int taps = 0;
    int counter_width = 0;
    int acc_width = 0; // tmcm out width + ceil(log2 N)
};

FoldedFir build_folded_fir(const DecoyPlan& plan, int taps);

uint64_t plan_hash(const DecoyPlan& plan);

} // namespace tmcm
