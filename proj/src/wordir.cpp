#include "tmcm/wordir.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "tmcm/core.hpp"

namespace tmcm {

int WordNetlist::add_node(WNode n) {
    nodes.push_back(std::move(n));
    return int(nodes.size()) - 1;
}

int EncoderTable::lookup(const std::vector<uint8_t>& key_bits, int sel) const {
    int match = -1;
    for (const auto& row : rows) {
        if (row.sel != sel) continue;
        bool ok = true;
        for (int b = 0; b < p && ok; ++b)
            if (row.key[b] >= 0 && row.key[b] != key_bits[b]) ok = false;
        if (!ok) continue;
        if (match >= 0) throw std::runtime_error("encoder table: ambiguous row match");
        match = row.g;
    }
    if (match < 0) throw std::runtime_error("encoder table: no row matches");
    return match;
}

std::string EncoderTable::to_text() const {
    std::ostringstream os;
    for (int b = 0; b < p; ++b) os << "k" << b;
    for (int b = 0; b < m; ++b) os << " i" << b;
    os << " | g (constant)\n";
    for (const auto& row : rows) {
        for (int b = 0; b < p; ++b) os << (row.key[b] < 0 ? 'X' : char('0' + row.key[b]));
        for (int b = m - 1; b >= 0; --b) os << ' ' << ((row.sel >> b) & 1);
        os << " | " << row.g << " (" << order[row.g] << "x)\n";
    }
    return os.str();
}

std::string SelectTable::to_text() const {
    std::ostringstream os;
    os << "g | base(shift,neg)";
    for (int t = 0; t < stage_count; ++t) os << " | stage" << t << "(shift,op)";
    os << "\n";
    for (const auto& row : rows) {
        os << row.g << " | <<" << shifts[row.base_shift_sel] << "," << (row.base_negate ? "-" : "+");
        for (const auto& st : row.stages) {
            os << " | ";
            if (st.bypass)
                os << "bypass";
            else
                os << "<<" << shifts[st.shift_sel] << "," << (st.subtract ? "-" : "+");
        }
        os << "\n";
    }
    return os.str();
}

int64_t eval_word(const WordNetlist& w, int64_t x, int sel, const std::vector<uint8_t>& key) {
    if (!fits_twos_complement(x, w.ibw)) throw std::invalid_argument("eval_word: x out of range");
    if (sel < 0 || (w.n > 0 && sel >= w.n)) throw std::invalid_argument("eval_word: select out of range");
    if (int(key.size()) != w.p) throw std::invalid_argument("eval_word: bad key length");

    std::vector<int64_t> val(w.nodes.size(), 0);
    for (size_t id = 0; id < w.nodes.size(); ++id) {
        const WNode& nd = w.nodes[id];
        auto op = [&](int k) { return val[nd.ops[k]]; };
        switch (nd.kind) {
        case WKind::DataInput: val[id] = x; break;
        case WKind::SelectInput: val[id] = sel; break;
        case WKind::KeyInput: {
            int64_t v = 0;
            for (int b = 0; b < w.p; ++b) v |= int64_t(key[b]) << b;
            val[id] = v;
            break;
        }
        case WKind::KeySlice: {
            int off = int(nd.a), len = int(nd.b);
            int64_t v = 0;
            for (int b = 0; b < len; ++b) v = (v << 1) | key[off + b];
            val[id] = v;
            break;
        }
        case WKind::Const: val[id] = nd.a; break;
        case WKind::ConstMux: val[id] = nd.slot_values[size_t(op(0))]; break;
        case WKind::MuxN: {
            size_t idx = size_t(op(0));
            size_t last = nd.ops.size() - 2;
            val[id] = val[nd.ops[1 + std::min(idx, last)]];
            break;
        }
        case WKind::SignExt: val[id] = op(0); break;
        case WKind::ShiftL: {
            int64_t v = op(0) << nd.a;
            if (!fits_twos_complement(v, nd.width))
                throw std::runtime_error("eval_word: shift overflow");
            val[id] = v;
            break;
        }
        case WKind::Add: val[id] = op(0) + op(1); break;
        case WKind::Sub: val[id] = op(0) - op(1); break;
        case WKind::AddSub: val[id] = op(2) ? op(0) - op(1) : op(0) + op(1); break;
        case WKind::Negate: val[id] = op(1) ? -op(0) : op(0); break;
        case WKind::Mul: val[id] = op(0) * op(1); break;
        case WKind::Encoder: val[id] = w.encoder.lookup(key, sel); break;
        case WKind::Ctl: val[id] = int64_t(w.ctl_fields[size_t(nd.a)].values[size_t(op(0))]); break;
        case WKind::Output: val[id] = op(0); break;
        }
        switch (nd.kind) {
        case WKind::Const:
        case WKind::ConstMux:
        case WKind::SignExt:
        case WKind::Add:
        case WKind::Sub:
        case WKind::AddSub:
        case WKind::Negate:
        case WKind::Mul:
            // A width violation here is a builder bug, not wraparound.
            if (!fits_twos_complement(val[id], nd.width))
                throw std::runtime_error("eval_word: value exceeds node width");
            break;
        default: break;
        }
    }
    int64_t out = val[w.outputs.at(0)];
    if (!fits_twos_complement(out, w.out_width))
        throw std::runtime_error("eval_word: output exceeds declared width");
    return out;
}

} // namespace tmcm
