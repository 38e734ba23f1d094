#include "tmcm/tmcm.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace tmcm {

ShiftAddExpr dbr_decompose(int64_t c, DigitRep rep) {
    if (c == 0) throw std::invalid_argument("dbr_decompose: zero constant");
    ShiftAddExpr e;
    e.constant = c;
    if (rep == DigitRep::Binary) {
        uint64_t mag = c < 0 ? uint64_t(-c) : uint64_t(c);
        DigitVector d = to_binary_digits(c, ceil_log2(mag + 1));
        for (int t = 0; t < d.width; ++t)
            if (d.digits[t]) e.terms.push_back({c < 0, t});
    } else {
        DigitVector d = to_csd(c);
        for (int t = 0; t < d.width; ++t)
            if (d.digits[t]) e.terms.push_back({d.digits[t] < 0, t});
    }
    return e;
}

namespace {

struct CseTerm {
    int node = -1; // -1 = x
    bool negative = false;
    int shift = 0;
};

struct PatternKey {
    int node_a, node_b;
    bool rel_neg;
    int delta;
    auto operator<=>(const PatternKey&) const = default;
};

// Canonical pattern of a term pair plus the occurrence's base shift/sign.
PatternKey pattern_of(const CseTerm& t1, const CseTerm& t2, int& base_shift, bool& neg) {
    const CseTerm* a = &t1;
    const CseTerm* b = &t2;
    if (b->shift < a->shift || (b->shift == a->shift && b->node < a->node)) std::swap(a, b);
    base_shift = a->shift;
    neg = a->negative;
    return {a->node, b->node, a->negative != b->negative, b->shift - a->shift};
}

int64_t ref_value(const ShiftAddGraph& g, const SaRef& r) {
    int64_t v = r.node < 0 ? 1 : g.nodes[size_t(r.node)].value;
    v <<= r.shift;
    return r.negative ? -v : v;
}

} // namespace

int ShiftAddGraph::op_count() const { return int(nodes.size()); }

int64_t ShiftAddGraph::eval_output(size_t idx, int64_t x) const {
    std::vector<int64_t> nv(nodes.size());
    auto rv = [&](const SaRef& r) {
        int64_t v = (r.node < 0 ? x : nv[size_t(r.node)]) << r.shift;
        return r.negative ? -v : v;
    };
    for (size_t i = 0; i < nodes.size(); ++i) nv[i] = rv(nodes[i].lhs) + rv(nodes[i].rhs);
    return rv(outputs[idx]);
}

ShiftAddGraph greedy_cse(const std::vector<ShiftAddExpr>& exprs) {
    if (exprs.empty()) throw std::invalid_argument("greedy_cse: empty list");
    ShiftAddGraph g;
    std::vector<std::vector<CseTerm>> work;
    for (const auto& e : exprs) {
        g.constants.push_back(e.constant);
        std::vector<CseTerm> ts;
        for (const auto& t : e.terms) ts.push_back({-1, t.negative, t.shift});
        work.push_back(std::move(ts));
    }

    // Repeatedly extract the most frequent two-term pattern. Counting uses a
    // greedy non-overlapping scan per constant, ties broken by the smaller
    // shift delta, then by pattern key.
    while (true) {
        std::map<PatternKey, int> count;
        for (const auto& terms : work) {
            std::map<PatternKey, std::vector<std::pair<size_t, size_t>>> occ;
            for (size_t i = 0; i < terms.size(); ++i)
                for (size_t j = i + 1; j < terms.size(); ++j) {
                    int bs;
                    bool neg;
                    occ[pattern_of(terms[i], terms[j], bs, neg)].emplace_back(i, j);
                }
            for (auto& [key, pairs] : occ) {
                std::vector<bool> used(terms.size(), false);
                int c = 0;
                for (auto [i, j] : pairs)
                    if (!used[i] && !used[j]) {
                        used[i] = used[j] = true;
                        ++c;
                    }
                count[key] += c;
            }
        }
        const PatternKey* best = nullptr;
        int best_count = 1;
        for (const auto& [key, c] : count) {
            if (c > best_count || (best && c == best_count && key.delta < best->delta)) {
                best = &key;
                best_count = c;
            }
        }
        if (!best) break;

        SaNode node;
        node.lhs = {best->node_a, false, 0};
        node.rhs = {best->node_b, best->rel_neg, best->delta};
        node.value = ref_value(g, node.lhs) + ref_value(g, node.rhs);
        int id = int(g.nodes.size());
        g.nodes.push_back(node);

        for (auto& terms : work) {
            std::vector<bool> used(terms.size(), false);
            std::vector<CseTerm> next;
            for (size_t i = 0; i < terms.size(); ++i) {
                if (used[i]) continue;
                bool replaced = false;
                for (size_t j = i + 1; j < terms.size() && !replaced; ++j) {
                    if (used[j]) continue;
                    int bs;
                    bool neg;
                    if (pattern_of(terms[i], terms[j], bs, neg) == *best) {
                        used[i] = used[j] = true;
                        next.push_back({id, neg, bs});
                        replaced = true;
                    }
                }
                if (!replaced) next.push_back(terms[i]);
            }
            terms = std::move(next);
        }
    }

    // Chain the leftover terms of each constant into adds.
    for (size_t c = 0; c < work.size(); ++c) {
        const auto& terms = work[c];
        SaRef acc{terms[0].node, terms[0].negative, terms[0].shift};
        for (size_t t = 1; t < terms.size(); ++t) {
            SaNode node;
            node.lhs = acc;
            node.rhs = {terms[t].node, terms[t].negative, terms[t].shift};
            node.value = ref_value(g, node.lhs) + ref_value(g, node.rhs);
            g.nodes.push_back(node);
            acc = {int(g.nodes.size()) - 1, false, 0};
        }
        g.outputs.push_back(acc);
        if (ref_value(g, acc) != g.constants[c])
            throw std::runtime_error("greedy_cse: output value mismatch");
    }
    return g;
}

std::vector<int64_t> global_order(const DecoyPlan& plan) {
    std::vector<int64_t> order;
    for (const auto& group : plan.positions)
        order.insert(order.end(), group.begin(), group.end());
    return order;
}

EncoderTable build_encoder_table(const DecoyPlan& plan) {
    EncoderTable t;
    t.order = global_order(plan);
    t.p = plan.p;
    t.m = plan.base.m;
    t.g_width = std::max(1, ceil_log2(t.order.size()));
    int g_off = 0;
    for (int j = 0; j < plan.base.n; ++j) {
        auto [off, len] = plan.correct_key.groups[j];
        int slots = 1 << plan.key_bits[j];
        for (int v = 0; v < slots; ++v) {
            EncoderRow row;
            row.key.assign(plan.p, -1);
            for (int b = 0; b < len; ++b) row.key[off + b] = int8_t((v >> (len - 1 - b)) & 1);
            row.sel = j;
            row.g = g_off + v;
            t.rows.push_back(row);
        }
        g_off += slots;
    }
    return t;
}

uint64_t plan_hash(const DecoyPlan& plan) {
    uint64_t h = 1469598103934665603ull;
    for (char c : plan.to_json()) {
        h ^= uint8_t(c);
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

// Shared tail of the mux-mul style builders: select mux over constant buses
// plus the signed multiplier.
void finish_mux_mul(WordNetlist& w, int x_node, int i_node, const std::vector<int>& const_buses,
                    int cw) {
    int sel;
    if (const_buses.size() == 1) {
        sel = const_buses[0];
    } else {
        WNode mux;
        mux.kind = WKind::MuxN;
        mux.width = cw;
        mux.ops.push_back(i_node);
        for (int c : const_buses) mux.ops.push_back(c);
        sel = w.add_node(mux);
    }
    WNode mul;
    mul.kind = WKind::Mul;
    mul.width = cw + w.ibw;
    mul.ops = {sel, x_node};
    int m = w.add_node(mul);
    WNode out;
    out.kind = WKind::Output;
    out.width = mul.width;
    out.ops = {m};
    w.outputs.push_back(w.add_node(out));
    w.out_width = mul.width;
}

} // namespace

WordNetlist build_tmcm_mul(const DecoyPlan& plan) {
    const ConstantSet& cs = plan.base;
    WordNetlist w;
    w.arch = "tmcm-mul";
    w.ibw = cs.ibw;
    w.m = cs.m;
    w.p = plan.p;
    w.n = cs.n;
    w.plan_hash = plan_hash(plan);
    int cw = cs.mbw + 1;

    int x = w.add_node({WKind::DataInput, cs.ibw, {}, 0, 0, {}});
    int i = w.add_node({WKind::SelectInput, cs.m, {}, 0, 0, {}});
    int k = w.add_node({WKind::KeyInput, plan.p, {}, 0, 0, {}});

    std::vector<int> buses;
    for (int j = 0; j < cs.n; ++j) {
        auto [off, len] = plan.correct_key.groups[j];
        if (len == 0) {
            buses.push_back(w.add_node({WKind::Const, cw, {}, cs.targets[j], 0, {}}));
            continue;
        }
        int ks = w.add_node({WKind::KeySlice, len, {k}, off, len, {}});
        WNode cm;
        cm.kind = WKind::ConstMux;
        cm.width = cw;
        cm.ops = {ks};
        cm.slot_values = plan.positions[j];
        buses.push_back(w.add_node(cm));
    }
    finish_mux_mul(w, x, i, buses, cw);
    return w;
}

WordNetlist build_tmcm_plain(const ConstantSet& cs) {
    WordNetlist w;
    w.arch = "tmcm-plain";
    w.ibw = cs.ibw;
    w.m = cs.m;
    w.p = 0;
    w.n = cs.n;
    int cw = cs.mbw + 1;

    int x = w.add_node({WKind::DataInput, cs.ibw, {}, 0, 0, {}});
    int i = w.add_node({WKind::SelectInput, cs.m, {}, 0, 0, {}});
    std::vector<int> buses;
    for (int64_t c : cs.targets) buses.push_back(w.add_node({WKind::Const, cw, {}, c, 0, {}}));
    finish_mux_mul(w, x, i, buses, cw);
    return w;
}

TmcmSa build_tmcm_sa(const DecoyPlan& plan, DigitRep rep) {
    const ConstantSet& cs = plan.base;
    TmcmSa sa;
    sa.encoder = build_encoder_table(plan);
    const std::vector<int64_t>& order = sa.encoder.order;

    std::vector<ShiftAddExpr> exprs;
    size_t max_terms = 1;
    std::vector<int> shifts;
    for (int64_t c : order) {
        exprs.push_back(dbr_decompose(c, rep));
        max_terms = std::max(max_terms, exprs.back().terms.size());
        for (const auto& t : exprs.back().terms) shifts.push_back(t.shift);
    }
    std::sort(shifts.begin(), shifts.end());
    shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());
    int stages = int(max_terms) - 1;
    int zero_slot = int(shifts.size());
    int sel_width = std::max(1, ceil_log2(uint64_t(shifts.size()) + 1));

    auto shift_index = [&](int s) {
        return int(std::lower_bound(shifts.begin(), shifts.end(), s) - shifts.begin());
    };

    sa.select.shifts = shifts;
    sa.select.stage_count = stages;

    WordNetlist& w = sa.netlist;
    w.arch = "tmcm-sa";
    w.ibw = cs.ibw;
    w.m = cs.m;
    w.p = plan.p;
    w.n = cs.n;
    w.encoder = sa.encoder;
    w.plan_hash = plan_hash(plan);
    int W = cs.ibw + cs.mbw + 1;

    // Control fields, one value per g.
    size_t ng = order.size();
    CtlField base_sel{"base_sel", sel_width, std::vector<uint64_t>(ng)};
    CtlField base_neg{"base_neg", 1, std::vector<uint64_t>(ng)};
    std::vector<CtlField> stage_sel, stage_sub;
    for (int t = 0; t < stages; ++t) {
        stage_sel.push_back({"s" + std::to_string(t) + "_sel", sel_width, std::vector<uint64_t>(ng)});
        stage_sub.push_back({"s" + std::to_string(t) + "_sub", 1, std::vector<uint64_t>(ng)});
    }
    for (size_t g = 0; g < ng; ++g) {
        const auto& terms = exprs[g].terms;
        base_sel.values[g] = uint64_t(shift_index(terms[0].shift));
        base_neg.values[g] = terms[0].negative;
        SelectRow row;
        row.g = int(g);
        row.base_shift_sel = int(base_sel.values[g]);
        row.base_negate = terms[0].negative;
        for (int t = 0; t < stages; ++t) {
            SelectStageCtl ctl;
            if (size_t(t) + 1 < terms.size()) {
                ctl.shift_sel = shift_index(terms[size_t(t) + 1].shift);
                ctl.subtract = terms[size_t(t) + 1].negative;
            } else {
                ctl.bypass = true;
                ctl.shift_sel = zero_slot;
            }
            stage_sel[size_t(t)].values[g] = uint64_t(ctl.bypass ? zero_slot : ctl.shift_sel);
            stage_sub[size_t(t)].values[g] = ctl.subtract;
            row.stages.push_back(ctl);
        }
        sa.select.rows.push_back(row);
    }
    w.ctl_fields.push_back(base_sel);
    w.ctl_fields.push_back(base_neg);
    for (int t = 0; t < stages; ++t) {
        w.ctl_fields.push_back(stage_sel[size_t(t)]);
        w.ctl_fields.push_back(stage_sub[size_t(t)]);
    }
    w.select = sa.select;

    int x = w.add_node({WKind::DataInput, cs.ibw, {}, 0, 0, {}});
    int i = w.add_node({WKind::SelectInput, cs.m, {}, 0, 0, {}});
    int k = w.add_node({WKind::KeyInput, plan.p, {}, 0, 0, {}});
    int enc = w.add_node({WKind::Encoder, sa.encoder.g_width, {k, i}, 0, 0, {}});
    int sx = w.add_node({WKind::SignExt, W, {x}, 0, 0, {}});
    std::vector<int> shifted;
    for (int s : shifts) shifted.push_back(w.add_node({WKind::ShiftL, W, {sx}, s, 0, {}}));
    int zero = w.add_node({WKind::Const, W, {}, 0, 0, {}});

    auto shift_mux = [&](int ctl_field, bool with_zero) {
        int ctl = w.add_node({WKind::Ctl, sel_width, {enc}, ctl_field, 0, {}});
        WNode mux;
        mux.kind = WKind::MuxN;
        mux.width = W;
        mux.ops.push_back(ctl);
        for (int s : shifted) mux.ops.push_back(s);
        if (with_zero) mux.ops.push_back(zero);
        return w.add_node(mux);
    };

    int base = shift_mux(0, false);
    int neg = w.add_node({WKind::Ctl, 1, {enc}, 1, 0, {}});
    int acc = w.add_node({WKind::Negate, W, {base, neg}, 0, 0, {}});
    for (int t = 0; t < stages; ++t) {
        int opnd = shift_mux(2 + 2 * t, true);
        int sub = w.add_node({WKind::Ctl, 1, {enc}, 2 + 2 * t + 1, 0, {}});
        acc = w.add_node({WKind::AddSub, W, {acc, opnd, sub}, 0, 0, {}});
    }
    WNode out;
    out.kind = WKind::Output;
    out.width = W;
    out.ops = {acc};
    w.outputs.push_back(w.add_node(out));
    w.out_width = W;
    return sa;
}

FoldedFir build_folded_fir(const DecoyPlan& plan, int taps) {
    if (plan.base.n != taps)
        throw std::invalid_argument("folded fir: tap count must equal number of constants");
    FoldedFir f;
    f.tmcm = build_tmcm_mul(plan);
    f.taps = taps;
    f.counter_width = std::max(1, ceil_log2(uint64_t(taps)));
    f.acc_width = f.tmcm.out_width + ceil_log2(uint64_t(taps) + 1);
    return f;
}

} // namespace tmcm
