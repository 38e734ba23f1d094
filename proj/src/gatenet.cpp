#include "tmcm/gatenet.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tmcm {

const char* gate_name(GKind k) {
    switch (k) {
    case GKind::And: return "AND";
    case GKind::Or: return "OR";
    case GKind::Xor: return "XOR";
    case GKind::Not: return "NOT";
    case GKind::Nand: return "NAND";
    case GKind::Nor: return "NOR";
    }
    return "?";
}

int32_t GateNetlist::add_gate(GKind k, int32_t a, int32_t b) {
    gates.push_back({k, a, b});
    return num_inputs + int32_t(gates.size()) - 1;
}

std::string GateNetlist::net_label(int32_t net) const {
    for (size_t i = 0; i < data_bits.size(); ++i)
        if (data_bits[i] == net) return "x" + std::to_string(i);
    for (size_t i = 0; i < sel_bits.size(); ++i)
        if (sel_bits[i] == net) return "i" + std::to_string(i);
    for (size_t i = 0; i < key_bits.size(); ++i)
        if (key_bits[i] == net) return "k" + std::to_string(i);
    return "n" + std::to_string(net);
}

GateStats stats(const GateNetlist& g) {
    GateStats s;
    s.gate_count = int64_t(g.gates.size());
    s.key_count = int(g.key_bits.size());
    std::vector<int> depth(size_t(g.net_count()), 0);
    for (size_t i = 0; i < g.gates.size(); ++i) {
        const Gate& gt = g.gates[i];
        int d = depth[size_t(gt.a)];
        if (gt.kind != GKind::Not) d = std::max(d, depth[size_t(gt.b)]);
        depth[size_t(g.num_inputs) + i] = d + 1;
        s.depth = std::max(s.depth, d + 1);
    }
    return s;
}

std::vector<uint64_t> eval_gates_packed(const GateNetlist& g, const std::vector<uint64_t>& inputs) {
    if (int32_t(inputs.size()) != g.num_inputs)
        throw std::invalid_argument("eval_gates: wrong input count");
    std::vector<uint64_t> v(size_t(g.net_count()));
    std::copy(inputs.begin(), inputs.end(), v.begin());
    size_t id = size_t(g.num_inputs);
    for (const Gate& gt : g.gates) {
        uint64_t a = v[size_t(gt.a)], b = v[size_t(gt.b)];
        uint64_t r;
        switch (gt.kind) {
        case GKind::And: r = a & b; break;
        case GKind::Or: r = a | b; break;
        case GKind::Xor: r = a ^ b; break;
        case GKind::Not: r = ~a; break;
        case GKind::Nand: r = ~(a & b); break;
        case GKind::Nor: r = ~(a | b); break;
        default: r = 0;
        }
        v[id++] = r;
    }
    std::vector<uint64_t> out;
    out.reserve(g.outputs.size());
    for (int32_t o : g.outputs) out.push_back(v[size_t(o)]);
    return out;
}

std::vector<uint8_t> eval_gates(const GateNetlist& g, const std::vector<uint8_t>& inputs) {
    std::vector<uint64_t> in(inputs.begin(), inputs.end());
    std::vector<uint64_t> out = eval_gates_packed(g, in);
    std::vector<uint8_t> bits;
    bits.reserve(out.size());
    for (uint64_t v : out) bits.push_back(uint8_t(v & 1));
    return bits;
}

std::vector<uint8_t> pack_inputs(const GateNetlist& g, int64_t x, int sel,
                                 const std::vector<uint8_t>& key) {
    if (key.size() != g.key_bits.size()) throw std::invalid_argument("pack_inputs: bad key length");
    std::vector<uint8_t> in(size_t(g.num_inputs), 0);
    for (size_t b = 0; b < g.data_bits.size(); ++b) in[size_t(g.data_bits[b])] = (x >> b) & 1;
    for (size_t b = 0; b < g.sel_bits.size(); ++b) in[size_t(g.sel_bits[b])] = (sel >> b) & 1;
    for (size_t b = 0; b < g.key_bits.size(); ++b) in[size_t(g.key_bits[b])] = key[b];
    return in;
}

int64_t unpack_output(const GateNetlist& g, const std::vector<uint8_t>& bits) {
    uint64_t v = 0;
    for (size_t b = 0; b < bits.size(); ++b) v |= uint64_t(bits[b] & 1) << b;
    int w = int(g.outputs.size());
    if (w < 64 && (v & (uint64_t{1} << (w - 1)))) return int64_t(v) - (int64_t{1} << w);
    return int64_t(v);
}

std::string to_bench(const GateNetlist& g) {
    std::ostringstream os;
    for (int32_t net = 0; net < g.num_inputs; ++net) os << "INPUT(" << g.net_label(net) << ")\n";
    for (int32_t o : g.outputs) os << "OUTPUT(" << g.net_label(o) << ")\n";
    for (size_t i = 0; i < g.gates.size(); ++i) {
        const Gate& gt = g.gates[i];
        int32_t net = g.num_inputs + int32_t(i);
        os << g.net_label(net) << " = " << gate_name(gt.kind) << "(" << g.net_label(gt.a);
        if (gt.kind != GKind::Not) os << ", " << g.net_label(gt.b);
        os << ")\n";
    }
    return os.str();
}

namespace {

struct BenchLine {
    std::string out;
    std::string op;
    std::vector<std::string> args;
};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

GKind gate_kind_from(const std::string& s) {
    std::string u;
    for (char c : s) u += char(toupper(c));
    if (u == "AND") return GKind::And;
    if (u == "OR") return GKind::Or;
    if (u == "XOR") return GKind::Xor;
    if (u == "NOT" || u == "INV" || u == "BUF") return GKind::Not; // BUF handled by caller
    if (u == "NAND") return GKind::Nand;
    if (u == "NOR") return GKind::Nor;
    if (u == "XNOR") return GKind::Xor; // caller adds the inverter
    throw std::runtime_error("bench: unsupported gate " + s);
}

} // namespace

GateNetlist from_bench(const std::string& text) {
    std::vector<std::string> input_names, output_names;
    std::vector<BenchLine> lines;
    std::istringstream is(text);
    std::string raw;
    while (std::getline(is, raw)) {
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto paren = line.find('(');
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::string head = trim(line.substr(0, paren));
            std::string arg = trim(line.substr(paren + 1, line.find(')') - paren - 1));
            if (head == "INPUT")
                input_names.push_back(arg);
            else if (head == "OUTPUT")
                output_names.push_back(arg);
            else
                throw std::runtime_error("bench: bad line: " + line);
            continue;
        }
        BenchLine bl;
        bl.out = trim(line.substr(0, eq));
        std::string rhs = trim(line.substr(eq + 1));
        paren = rhs.find('(');
        bl.op = trim(rhs.substr(0, paren));
        std::string args = rhs.substr(paren + 1, rhs.rfind(')') - paren - 1);
        std::istringstream as(args);
        std::string a;
        while (std::getline(as, a, ',')) bl.args.push_back(trim(a));
        lines.push_back(std::move(bl));
    }

    GateNetlist g;
    g.num_inputs = int32_t(input_names.size());
    std::map<std::string, int32_t> net_of;
    for (size_t i = 0; i < input_names.size(); ++i) {
        const std::string& nm = input_names[i];
        int32_t net = int32_t(i);
        net_of[nm] = net;
        // Classification by conventional names; anything unrecognized is data.
        bool digits = nm.size() > 1 && nm.find_first_not_of("0123456789", 1) == std::string::npos;
        if (nm.rfind("keyinput", 0) == 0 || (digits && nm[0] == 'k'))
            g.key_bits.push_back(net);
        else if (digits && nm[0] == 'i')
            g.sel_bits.push_back(net);
        else
            g.data_bits.push_back(net);
    }

    // Gate lines may appear in any order; emit in dependency order.
    std::map<std::string, size_t> line_of;
    for (size_t i = 0; i < lines.size(); ++i) line_of[lines[i].out] = i;
    std::vector<int> state(lines.size(), 0);
    std::vector<size_t> stack;
    auto resolve = [&](const std::string& name) -> int32_t {
        auto it = net_of.find(name);
        if (it == net_of.end()) throw std::runtime_error("bench: undriven net " + name);
        return it->second;
    };
    std::vector<size_t> order;
    std::vector<size_t> work;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (state[i]) continue;
        work.push_back(i);
        while (!work.empty()) {
            size_t cur = work.back();
            if (state[cur] == 2) {
                work.pop_back();
                continue;
            }
            state[cur] = 1;
            bool ready = true;
            for (const std::string& arg : lines[cur].args) {
                if (net_of.count(arg)) continue;
                auto it = line_of.find(arg);
                if (it == line_of.end()) throw std::runtime_error("bench: undriven net " + arg);
                if (state[it->second] == 1) throw std::runtime_error("bench: combinational cycle");
                if (state[it->second] == 0) {
                    work.push_back(it->second);
                    ready = false;
                }
            }
            if (ready) {
                state[cur] = 2;
                order.push_back(cur);
                work.pop_back();
            }
        }
    }

    for (size_t idx : order) {
        const BenchLine& bl = lines[idx];
        std::string u;
        for (char c : bl.op) u += char(toupper(c));
        std::vector<int32_t> args;
        for (const std::string& a : bl.args) args.push_back(resolve(a));
        int32_t net;
        if (u == "BUF" && args.size() == 1) {
            net = g.add_gate(GKind::Not, g.add_gate(GKind::Not, args[0]));
        } else if (u == "NOT" || u == "INV") {
            net = g.add_gate(GKind::Not, args[0]);
        } else if (args.size() == 2) {
            net = g.add_gate(gate_kind_from(u), args[0], args[1]);
            if (u == "XNOR") net = g.add_gate(GKind::Not, net);
        } else {
            // Wide gates become a chain of the base op plus an inverter for
            // the negated forms.
            GKind base = u == "NAND" ? GKind::And : u == "NOR" ? GKind::Or : gate_kind_from(u);
            net = g.add_gate(base, args.at(0), args.at(1));
            for (size_t a = 2; a < args.size(); ++a) net = g.add_gate(base, net, args[a]);
            if (u == "NAND" || u == "NOR" || u == "XNOR") net = g.add_gate(GKind::Not, net);
        }
        net_of[bl.out] = net;
    }
    for (const std::string& nm : output_names) g.outputs.push_back(resolve(nm));
    return g;
}

} // namespace tmcm
