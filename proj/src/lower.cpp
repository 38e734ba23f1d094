#include "tmcm/lower.hpp"

#include <stdexcept>
#include <vector>

namespace tmcm {

namespace {

using Bits = std::vector<int32_t>;

class Lowerer {
  public:
    explicit Lowerer(const WordNetlist& w) : w_(w) {}

    GateNetlist run() {
        g_.num_inputs = w_.ibw + w_.m + w_.p;
        int32_t net = 0;
        for (int b = 0; b < w_.ibw; ++b) g_.data_bits.push_back(net++);
        for (int b = 0; b < w_.m; ++b) g_.sel_bits.push_back(net++);
        for (int b = 0; b < w_.p; ++b) g_.key_bits.push_back(net++);

        bits_.resize(w_.nodes.size());
        for (size_t id = 0; id < w_.nodes.size(); ++id) lower_node(int(id));
        for (int o : w_.outputs)
            for (int32_t b : bits_[size_t(o)]) g_.outputs.push_back(b);
        return g_;
    }

  private:
    const WordNetlist& w_;
    GateNetlist g_;
    std::vector<Bits> bits_;
    int32_t const0_ = -1, const1_ = -1;
    std::vector<int32_t> not_cache_;

    int32_t const0() {
        if (const0_ < 0) const0_ = g_.add_gate(GKind::Xor, 0, 0);
        return const0_;
    }
    int32_t const1() {
        if (const1_ < 0) const1_ = g_.add_gate(GKind::Not, const0());
        return const1_;
    }
    int32_t inv(int32_t a) {
        if (int32_t(not_cache_.size()) <= a) not_cache_.resize(size_t(a) + 1, -1);
        if (not_cache_[size_t(a)] < 0) not_cache_[size_t(a)] = g_.add_gate(GKind::Not, a);
        return not_cache_[size_t(a)];
    }

    int32_t mux2(int32_t a, int32_t b, int32_t s) { // s=0 -> a
        int32_t t0 = g_.add_gate(GKind::And, a, inv(s));
        int32_t t1 = g_.add_gate(GKind::And, b, s);
        return g_.add_gate(GKind::Or, t0, t1);
    }

    // Sum of products: each term is a list of (net, polarity) literals.
    int32_t sop(const std::vector<std::vector<std::pair<int32_t, bool>>>& terms) {
        std::vector<int32_t> products;
        for (const auto& term : terms) {
            if (term.empty()) return const1(); // unconditional term
            int32_t acc = term[0].second ? term[0].first : inv(term[0].first);
            for (size_t l = 1; l < term.size(); ++l) {
                int32_t lit = term[l].second ? term[l].first : inv(term[l].first);
                acc = g_.add_gate(GKind::And, acc, lit);
            }
            products.push_back(acc);
        }
        if (products.empty()) return const0();
        int32_t acc = products[0];
        for (size_t i = 1; i < products.size(); ++i) acc = g_.add_gate(GKind::Or, acc, products[i]);
        return acc;
    }

    Bits ripple_add(const Bits& a, const Bits& b, int32_t cin) {
        Bits sum(a.size());
        int32_t c = cin;
        for (size_t t = 0; t < a.size(); ++t) {
            int32_t axb = g_.add_gate(GKind::Xor, a[t], b[t]);
            sum[t] = g_.add_gate(GKind::Xor, axb, c);
            int32_t t1 = g_.add_gate(GKind::And, a[t], b[t]);
            int32_t t2 = g_.add_gate(GKind::And, c, axb);
            c = g_.add_gate(GKind::Or, t1, t2);
        }
        return sum;
    }

    Bits const_bits(uint64_t v, int width) {
        Bits out(static_cast<size_t>(width));
        for (int t = 0; t < width; ++t) out[size_t(t)] = (v >> t) & 1 ? const1() : const0();
        return out;
    }

    Bits sign_extend(const Bits& a, int width) {
        Bits out = a;
        while (int(out.size()) < width) out.push_back(a.back());
        out.resize(size_t(width));
        return out;
    }

    // Word mux over 2^k inputs (padded by repeating the last input, which
    // realizes the clamp semantics of MuxN).
    Bits mux_tree(const std::vector<Bits>& inputs, const Bits& sel) {
        std::vector<Bits> cur = inputs;
        size_t want = size_t{1} << sel.size();
        while (cur.size() < want) cur.push_back(cur.back());
        for (size_t level = 0; level < sel.size(); ++level) {
            std::vector<Bits> next;
            for (size_t i = 0; i < cur.size(); i += 2) {
                Bits o(cur[i].size());
                for (size_t t = 0; t < o.size(); ++t)
                    o[t] = mux2(cur[i][t], cur[i + 1][t], sel[level]);
                next.push_back(std::move(o));
            }
            cur = std::move(next);
        }
        return cur[0];
    }

    void lower_node(int id) {
        const WNode& nd = w_.nodes[size_t(id)];
        Bits out;
        switch (nd.kind) {
        case WKind::DataInput: out = Bits(g_.data_bits.begin(), g_.data_bits.end()); break;
        case WKind::SelectInput: out = Bits(g_.sel_bits.begin(), g_.sel_bits.end()); break;
        case WKind::KeyInput: out = Bits(g_.key_bits.begin(), g_.key_bits.end()); break;
        case WKind::KeySlice: {
            // Value bit t (LSB) is key bit off + len - 1 - t.
            int off = int(nd.a), len = int(nd.b);
            for (int t = 0; t < len; ++t)
                out.push_back(g_.key_bits[size_t(off + len - 1 - t)]);
            break;
        }
        case WKind::Const: out = const_bits(uint64_t(nd.a), nd.width); break;
        case WKind::ConstMux: {
            // Per output bit, two-level AND-OR over the slot select bits.
            const Bits& sel = bits_[size_t(nd.ops[0])];
            for (int t = 0; t < nd.width; ++t) {
                std::vector<std::vector<std::pair<int32_t, bool>>> terms;
                for (size_t v = 0; v < nd.slot_values.size(); ++v) {
                    if (!((uint64_t(nd.slot_values[v]) >> t) & 1)) continue;
                    std::vector<std::pair<int32_t, bool>> term;
                    for (size_t b = 0; b < sel.size(); ++b)
                        term.emplace_back(sel[b], (v >> b) & 1);
                    terms.push_back(std::move(term));
                }
                out.push_back(sop(terms));
            }
            break;
        }
        case WKind::MuxN: {
            const Bits& sel = bits_[size_t(nd.ops[0])];
            std::vector<Bits> inputs;
            for (size_t i = 1; i < nd.ops.size(); ++i) inputs.push_back(bits_[size_t(nd.ops[i])]);
            out = sel.empty() ? inputs[0] : mux_tree(inputs, sel);
            break;
        }
        case WKind::SignExt: out = sign_extend(bits_[size_t(nd.ops[0])], nd.width); break;
        case WKind::ShiftL: {
            const Bits& src = bits_[size_t(nd.ops[0])];
            for (int t = 0; t < int(nd.a); ++t) out.push_back(const0());
            for (int t = 0; int(out.size()) < nd.width; ++t) out.push_back(src[size_t(t)]);
            break;
        }
        case WKind::Add:
            out = ripple_add(bits_[size_t(nd.ops[0])], bits_[size_t(nd.ops[1])], const0());
            break;
        case WKind::Sub: {
            Bits nb;
            for (int32_t b : bits_[size_t(nd.ops[1])]) nb.push_back(inv(b));
            out = ripple_add(bits_[size_t(nd.ops[0])], nb, const1());
            break;
        }
        case WKind::AddSub: {
            int32_t s = bits_[size_t(nd.ops[2])][0];
            Bits xb;
            for (int32_t b : bits_[size_t(nd.ops[1])]) xb.push_back(g_.add_gate(GKind::Xor, b, s));
            out = ripple_add(bits_[size_t(nd.ops[0])], xb, s);
            break;
        }
        case WKind::Negate: {
            // (src xor s) + s via a half-adder carry chain.
            int32_t s = bits_[size_t(nd.ops[1])][0];
            const Bits& src = bits_[size_t(nd.ops[0])];
            int32_t carry = s;
            for (size_t t = 0; t < src.size(); ++t) {
                int32_t xb = g_.add_gate(GKind::Xor, src[t], s);
                out.push_back(g_.add_gate(GKind::Xor, xb, carry));
                if (t + 1 < src.size()) carry = g_.add_gate(GKind::And, xb, carry);
            }
            break;
        }
        case WKind::Mul: {
            // Sign-extended shift-add array, product taken mod 2^width.
            Bits a = sign_extend(bits_[size_t(nd.ops[0])], nd.width);
            Bits b = sign_extend(bits_[size_t(nd.ops[1])], nd.width);
            Bits acc;
            for (int t = 0; t < nd.width; ++t) {
                Bits row(size_t(nd.width));
                for (int u = 0; u < t; ++u) row[size_t(u)] = const0();
                for (int u = t; u < nd.width; ++u)
                    row[size_t(u)] = g_.add_gate(GKind::And, a[size_t(t)], b[size_t(u - t)]);
                acc = t == 0 ? row : ripple_add(acc, row, const0());
            }
            out = acc;
            break;
        }
        case WKind::Encoder: {
            const Bits& sel = bits_[size_t(nd.ops[1])];
            for (int t = 0; t < nd.width; ++t) {
                std::vector<std::vector<std::pair<int32_t, bool>>> terms;
                for (const EncoderRow& row : w_.encoder.rows) {
                    if (!((row.g >> t) & 1)) continue;
                    std::vector<std::pair<int32_t, bool>> term;
                    for (int b = 0; b < w_.p; ++b)
                        if (row.key[size_t(b)] >= 0)
                            term.emplace_back(g_.key_bits[size_t(b)], row.key[size_t(b)] == 1);
                    for (size_t b = 0; b < sel.size(); ++b)
                        term.emplace_back(sel[b], (row.sel >> b) & 1);
                    terms.push_back(std::move(term));
                }
                out.push_back(sop(terms));
            }
            break;
        }
        case WKind::Ctl: {
            const Bits& gbits = bits_[size_t(nd.ops[0])];
            const CtlField& f = w_.ctl_fields[size_t(nd.a)];
            for (int t = 0; t < nd.width; ++t) {
                std::vector<std::vector<std::pair<int32_t, bool>>> terms;
                for (size_t gv = 0; gv < f.values.size(); ++gv) {
                    if (!((f.values[gv] >> t) & 1)) continue;
                    std::vector<std::pair<int32_t, bool>> term;
                    for (size_t b = 0; b < gbits.size(); ++b)
                        term.emplace_back(gbits[b], (gv >> b) & 1);
                    terms.push_back(std::move(term));
                }
                out.push_back(sop(terms));
            }
            break;
        }
        case WKind::Output: out = bits_[size_t(nd.ops[0])]; break;
        default: throw std::runtime_error("lower_to_gates: unsupported node kind");
        }
        bits_[size_t(id)] = std::move(out);
    }
};

} // namespace

GateNetlist lower_to_gates(const WordNetlist& w) { return Lowerer(w).run(); }

} // namespace tmcm
