#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tmcm {

// Clauses over DIMACS-style literals: variable v (1-based) is v / -v.
struct CNF {
    int num_vars = 0;
    std::vector<std::vector<int>> clauses;

    int new_var() { return ++num_vars; }
    void add(std::vector<int> clause);
    std::string to_dimacs() const;
};

enum class SatStatus { Sat, Unsat, Limit };

struct SolverStats {
    uint64_t conflicts = 0;
    uint64_t decisions = 0;
    uint64_t propagations = 0;
};

// Conflict-driven clause learning with two-watched-literal propagation,
// VSIDS-style activities, phase saving, and geometric restarts. Deterministic for
// a fixed clause sequence.
class Solver {
  public:
    int new_var();
    int num_vars() const { return nvars_; }
    void add_clause(const std::vector<int>& lits);

    SatStatus solve(const std::vector<int>& assumptions = {}, uint64_t conflict_limit = ~uint64_t{0});

    bool value(int var) const; // after Sat
    const SolverStats& stats() const { return stats_; }
    bool ok() const { return ok_; }

  private:
    struct Clause {
        std::vector<int> lits; // internal literals
        bool learned = false;
        double activity = 0.0;
    };

    // internal literal: var*2 (positive) or var*2+1 (negative), var 0-based
    static int ilit(int dimacs) {
        int v = dimacs > 0 ? dimacs : -dimacs;
        return (v - 1) * 2 + (dimacs < 0);
    }
    static int neg(int l) { return l ^ 1; }
    static int var_of(int l) { return l >> 1; }

    bool enqueue(int lit, int reason);
    int propagate();
    void analyze(int confl, std::vector<int>& learnt, int& backtrack_level);
    void backtrack(int level);
    int pick_branch();
    void bump_var(int v);
    void decay_activities();
    void attach(int ci);
    void reduce_db();

    int nvars_ = 0;
    bool ok_ = true;
    std::vector<Clause> clauses_;
    std::vector<std::vector<int>> watches_; // lit -> clause indices
    std::vector<int8_t> assign_;            // var -> -1 unset / 0 false / 1 true
    std::vector<int8_t> phase_;
    std::vector<int> level_;
    std::vector<int> reason_;
    std::vector<int> trail_;
    std::vector<int> trail_lim_;
    size_t qhead_ = 0;
    std::vector<double> activity_;
    double var_inc_ = 1.0;
    std::vector<int> order_; // lazy activity ordering helpers
    std::vector<uint8_t> seen_;
    SolverStats stats_;
    uint64_t learned_since_reduce_ = 0;

    // binary heap keyed by (activity, lowest index wins ties)
    std::vector<int> heap_;
    std::vector<int> heap_pos_;
    bool heap_less(int a, int b) const;
    void heap_up(size_t i);
    void heap_down(size_t i);
    void heap_insert(int v);
    int heap_pop();
};

SatStatus sat_solve(CNF& cnf, const std::vector<int>& assumptions, std::vector<uint8_t>* model);

} // namespace tmcm
