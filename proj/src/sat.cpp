#include "tmcm/sat.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace tmcm {

void CNF::add(std::vector<int> clause) {
    if (clause.empty()) throw std::invalid_argument("cnf: empty clause at construction");
    for (int l : clause)
        if (l == 0 || std::abs(l) > num_vars) throw std::invalid_argument("cnf: bad literal");
    clauses.push_back(std::move(clause));
}

std::string CNF::to_dimacs() const {
    std::ostringstream os;
    os << "p cnf " << num_vars << " " << clauses.size() << "\n";
    for (const auto& c : clauses) {
        for (int l : c) os << l << " ";
        os << "0\n";
    }
    return os.str();
}

int Solver::new_var() {
    ++nvars_;
    watches_.resize(size_t(nvars_) * 2);
    assign_.push_back(-1);
    phase_.push_back(0);
    level_.push_back(0);
    reason_.push_back(-1);
    activity_.push_back(0.0);
    seen_.push_back(0);
    heap_pos_.push_back(-1);
    heap_insert(nvars_ - 1);
    return nvars_;
}

bool Solver::heap_less(int a, int b) const {
    if (activity_[size_t(a)] != activity_[size_t(b)]) return activity_[size_t(a)] > activity_[size_t(b)];
    return a < b;
}

void Solver::heap_up(size_t i) {
    int v = heap_[i];
    while (i > 0) {
        size_t p = (i - 1) / 2;
        if (!heap_less(v, heap_[p])) break;
        heap_[i] = heap_[p];
        heap_pos_[size_t(heap_[i])] = int(i);
        i = p;
    }
    heap_[i] = v;
    heap_pos_[size_t(v)] = int(i);
}

void Solver::heap_down(size_t i) {
    int v = heap_[i];
    size_t n = heap_.size();
    while (true) {
        size_t c = 2 * i + 1;
        if (c >= n) break;
        if (c + 1 < n && heap_less(heap_[c + 1], heap_[c])) ++c;
        if (!heap_less(heap_[c], v)) break;
        heap_[i] = heap_[c];
        heap_pos_[size_t(heap_[i])] = int(i);
        i = c;
    }
    heap_[i] = v;
    heap_pos_[size_t(v)] = int(i);
}

void Solver::heap_insert(int v) {
    if (heap_pos_[size_t(v)] >= 0) return;
    heap_.push_back(v);
    heap_pos_[size_t(v)] = int(heap_.size()) - 1;
    heap_up(heap_.size() - 1);
}

int Solver::heap_pop() {
    int v = heap_[0];
    heap_pos_[size_t(v)] = -1;
    heap_[0] = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
        heap_pos_[size_t(heap_[0])] = 0;
        heap_down(0);
    }
    return v;
}

void Solver::attach(int ci) {
    const Clause& c = clauses_[size_t(ci)];
    watches_[size_t(c.lits[0])].push_back(ci);
    watches_[size_t(c.lits[1])].push_back(ci);
}

void Solver::add_clause(const std::vector<int>& dimacs) {
    if (!ok_) return;
    if (dimacs.empty()) {
        ok_ = false;
        return;
    }
    std::vector<int> lits;
    for (int dl : dimacs) {
        while (std::abs(dl) > nvars_) new_var();
        lits.push_back(ilit(dl));
    }
    // drop duplicates, detect tautologies
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (size_t i = 0; i + 1 < lits.size(); ++i)
        if (lits[i + 1] == neg(lits[i])) return;

    // Clauses may arrive between solve calls; fold in the current root-level
    // assignment.
    if (!trail_lim_.empty()) backtrack(0);
    std::vector<int> live;
    for (int l : lits) {
        int8_t v = assign_[size_t(var_of(l))];
        if (v == -1) {
            live.push_back(l);
        } else if ((v == 1) == ((l & 1) == 0)) {
            return; // satisfied at root
        }
    }
    if (live.empty()) {
        ok_ = false;
        return;
    }
    if (live.size() == 1) {
        if (!enqueue(live[0], -1)) ok_ = false;
        else if (propagate() != -1) ok_ = false;
        return;
    }
    Clause c;
    c.lits = live;
    clauses_.push_back(std::move(c));
    attach(int(clauses_.size()) - 1);
}

bool Solver::enqueue(int lit, int reason) {
    int v = var_of(lit);
    int8_t want = (lit & 1) == 0 ? 1 : 0;
    if (assign_[size_t(v)] != -1) return assign_[size_t(v)] == want;
    assign_[size_t(v)] = want;
    phase_[size_t(v)] = want;
    level_[size_t(v)] = int(trail_lim_.size());
    reason_[size_t(v)] = reason;
    trail_.push_back(lit);
    return true;
}

int Solver::propagate() {
    while (qhead_ < trail_.size()) {
        int lit = trail_[qhead_++];
        ++stats_.propagations;
        int flit = neg(lit); // falsified literal
        std::vector<int>& ws = watches_[size_t(flit)];
        size_t keep = 0;
        for (size_t wi = 0; wi < ws.size(); ++wi) {
            int ci = ws[wi];
            Clause& c = clauses_[size_t(ci)];
            if (c.lits[0] == flit) std::swap(c.lits[0], c.lits[1]);
            // c.lits[1] == flit now
            int first = c.lits[0];
            int8_t fv = assign_[size_t(var_of(first))];
            if (fv != -1 && (fv == 1) == ((first & 1) == 0)) {
                ws[keep++] = ci; // satisfied
                continue;
            }
            bool moved = false;
            for (size_t k = 2; k < c.lits.size(); ++k) {
                int l = c.lits[k];
                int8_t v = assign_[size_t(var_of(l))];
                if (v == -1 || (v == 1) == ((l & 1) == 0)) {
                    std::swap(c.lits[1], c.lits[k]);
                    watches_[size_t(c.lits[1])].push_back(ci);
                    moved = true;
                    break;
                }
            }
            if (moved) continue;
            ws[keep++] = ci;
            if (!enqueue(first, ci)) {
                // conflict: keep remaining watches, report
                for (size_t r = wi + 1; r < ws.size(); ++r) ws[keep++] = ws[r];
                ws.resize(keep);
                qhead_ = trail_.size();
                return ci;
            }
        }
        ws.resize(keep);
    }
    return -1;
}

void Solver::bump_var(int v) {
    activity_[size_t(v)] += var_inc_;
    if (activity_[size_t(v)] > 1e100) {
        for (double& a : activity_) a *= 1e-100;
        var_inc_ *= 1e-100;
    }
    if (heap_pos_[size_t(v)] >= 0) heap_up(size_t(heap_pos_[size_t(v)]));
}

void Solver::decay_activities() { var_inc_ /= 0.95; }

void Solver::analyze(int confl, std::vector<int>& learnt, int& backtrack_level) {
    learnt.clear();
    learnt.push_back(0); // slot for the asserting literal
    int counter = 0;
    int lit = -1;
    size_t idx = trail_.size();
    int level = int(trail_lim_.size());

    int ci = confl;
    while (true) {
        Clause& c = clauses_[size_t(ci)];
        if (c.learned) c.activity += 1.0;
        for (size_t k = (lit == -1 ? 0 : 1); k < c.lits.size(); ++k) {
            int q = c.lits[k];
            int v = var_of(q);
            if (seen_[size_t(v)] || level_[size_t(v)] == 0) continue;
            seen_[size_t(v)] = 1;
            bump_var(v);
            if (level_[size_t(v)] >= level)
                ++counter;
            else
                learnt.push_back(q);
        }
        // next literal on trail to expand
        do {
            lit = trail_[--idx];
        } while (!seen_[size_t(var_of(lit))]);
        seen_[size_t(var_of(lit))] = 0;
        --counter;
        if (counter == 0) break;
        ci = reason_[size_t(var_of(lit))];
    }
    learnt[0] = neg(lit);

    backtrack_level = 0;
    if (learnt.size() > 1) {
        size_t max_i = 1;
        for (size_t k = 2; k < learnt.size(); ++k)
            if (level_[size_t(var_of(learnt[k]))] > level_[size_t(var_of(learnt[max_i]))]) max_i = k;
        std::swap(learnt[1], learnt[max_i]);
        backtrack_level = level_[size_t(var_of(learnt[1]))];
    }
    for (int l : learnt) seen_[size_t(var_of(l))] = 0;
}

void Solver::backtrack(int level) {
    if (int(trail_lim_.size()) <= level) return;
    size_t bound = size_t(trail_lim_[size_t(level)]);
    for (size_t i = trail_.size(); i-- > bound;) {
        int v = var_of(trail_[i]);
        assign_[size_t(v)] = -1;
        reason_[size_t(v)] = -1;
        heap_insert(v);
    }
    trail_.resize(bound);
    trail_lim_.resize(size_t(level));
    qhead_ = bound;
}

int Solver::pick_branch() {
    while (!heap_.empty()) {
        int v = heap_pop();
        if (assign_[size_t(v)] == -1) return v;
    }
    return -1;
}

void Solver::reduce_db() {
    // Drop the less active half of long learned clauses. Indices of kept
    // clauses shift, so rebuild watches and reasons via a remap.
    std::vector<int> learned;
    for (size_t i = 0; i < clauses_.size(); ++i)
        if (clauses_[i].learned && clauses_[i].lits.size() > 2) learned.push_back(int(i));
    if (learned.size() < 512) return;
    std::vector<int> by_act = learned;
    std::sort(by_act.begin(), by_act.end(), [&](int a, int b) {
        if (clauses_[size_t(a)].activity != clauses_[size_t(b)].activity)
            return clauses_[size_t(a)].activity < clauses_[size_t(b)].activity;
        return a < b;
    });
    std::vector<uint8_t> drop(clauses_.size(), 0);
    std::vector<uint8_t> locked(clauses_.size(), 0);
    for (int l : trail_) {
        int r = reason_[size_t(var_of(l))];
        if (r >= 0) locked[size_t(r)] = 1;
    }
    size_t to_drop = by_act.size() / 2;
    for (size_t i = 0; i < to_drop; ++i)
        if (!locked[size_t(by_act[i])]) drop[size_t(by_act[i])] = 1;

    std::vector<int> remap(clauses_.size(), -1);
    std::vector<Clause> kept;
    for (size_t i = 0; i < clauses_.size(); ++i) {
        if (drop[i]) continue;
        remap[i] = int(kept.size());
        kept.push_back(std::move(clauses_[i]));
    }
    clauses_ = std::move(kept);
    for (auto& w : watches_) w.clear();
    for (size_t i = 0; i < clauses_.size(); ++i) attach(int(i));
    for (int& r : reason_)
        if (r >= 0) r = remap[size_t(r)];
}

SatStatus Solver::solve(const std::vector<int>& assumptions, uint64_t conflict_limit) {
    if (!ok_) return SatStatus::Unsat;
    backtrack(0);
    if (propagate() != -1) {
        ok_ = false;
        return SatStatus::Unsat;
    }

    std::vector<int> assume;
    for (int dl : assumptions) {
        while (std::abs(dl) > nvars_) new_var();
        assume.push_back(ilit(dl));
    }

    uint64_t conflicts_at_start = stats_.conflicts;
    uint64_t restart_unit = 128; // geometric restart schedule
    uint64_t next_restart = stats_.conflicts + restart_unit;

    while (true) {
        int confl = propagate();
        if (confl != -1) {
            ++stats_.conflicts;
            if (trail_lim_.empty()) {
                ok_ = false;
                return SatStatus::Unsat;
            }
            // Conflicts below the assumption prefix mean unsat under
            // assumptions.
            std::vector<int> learnt;
            int blevel;
            analyze(confl, learnt, blevel);
            backtrack(std::max(blevel, 0));
            if (learnt.size() == 1) {
                if (int(trail_lim_.size()) > 0) backtrack(0);
                if (!enqueue(learnt[0], -1)) {
                    ok_ = false;
                    return SatStatus::Unsat;
                }
            } else {
                Clause c;
                c.lits = learnt;
                c.learned = true;
                c.activity = 1.0;
                clauses_.push_back(std::move(c));
                attach(int(clauses_.size()) - 1);
                ++learned_since_reduce_;
                enqueue(learnt[0], int(clauses_.size()) - 1);
            }
            decay_activities();
            if (stats_.conflicts - conflicts_at_start > conflict_limit) return SatStatus::Limit;
            if (stats_.conflicts >= next_restart) {
                next_restart += restart_unit;
                restart_unit = restart_unit * 3 / 2;
                backtrack(0);
            }
            if (learned_since_reduce_ >= 4096) {
                learned_since_reduce_ = 0;
                backtrack(0);
                reduce_db();
            }
        } else {
            // extend assumptions first
            bool assumed_all = true;
            for (int al : assume) {
                int v = var_of(al);
                int8_t want = (al & 1) == 0 ? 1 : 0;
                if (assign_[size_t(v)] == -1) {
                    trail_lim_.push_back(int(trail_.size()));
                    enqueue(al, -1);
                    assumed_all = false;
                    break;
                }
                if (assign_[size_t(v)] != want) return SatStatus::Unsat;
            }
            if (!assumed_all) continue;
            int v = pick_branch();
            if (v == -1) return SatStatus::Sat;
            ++stats_.decisions;
            trail_lim_.push_back(int(trail_.size()));
            enqueue(phase_[size_t(v)] ? v * 2 : v * 2 + 1, -1);
        }
    }
}

bool Solver::value(int var) const { return assign_[size_t(var - 1)] == 1; }

SatStatus sat_solve(CNF& cnf, const std::vector<int>& assumptions, std::vector<uint8_t>* model) {
    Solver s;
    while (s.num_vars() < cnf.num_vars) s.new_var();
    for (const auto& c : cnf.clauses) s.add_clause(c);
    SatStatus st = s.solve(assumptions);
    if (st == SatStatus::Sat && model) {
        model->assign(size_t(cnf.num_vars) + 1, 0);
        for (int v = 1; v <= cnf.num_vars; ++v) (*model)[size_t(v)] = s.value(v);
    }
    return st;
}

} // namespace tmcm
