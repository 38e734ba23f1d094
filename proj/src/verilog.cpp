#include "tmcm/verilog.hpp"

#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tmcm {

namespace {

std::string literal(int width, int64_t value) {
    uint64_t mask = width >= 64 ? ~uint64_t{0} : (uint64_t{1} << width) - 1;
    std::ostringstream os;
    os << width << "'d" << (uint64_t(value) & mask);
    return os.str();
}

std::string wire_name(int id) { return "n" + std::to_string(id); }

std::string range(int width) {
    std::ostringstream os;
    os << "[" << width - 1 << ":0] ";
    return os.str();
}

} // namespace

std::string emit_verilog(const WordNetlist& w, const std::string& module_name) {
    std::ostringstream os;
    os << "module " << module_name << " (\n";
    os << "  input  " << range(w.ibw) << "x,\n";
    if (w.m > 0) os << "  input  " << range(w.m) << "i,\n";
    if (w.p > 0) os << "  input  " << range(w.p) << "k,\n";
    os << "  output " << range(w.out_width) << "f\n";
    os << ");\n\n";

    std::vector<std::string> always_blocks;
    for (size_t id = 0; id < w.nodes.size(); ++id) {
        const WNode& nd = w.nodes[id];
        std::string me = wire_name(int(id));
        auto op = [&](int j) { return wire_name(nd.ops[size_t(j)]); };
        std::ostringstream blk;
        switch (nd.kind) {
        case WKind::DataInput:
            os << "  wire " << range(nd.width) << me << " = x;\n";
            break;
        case WKind::SelectInput:
            if (nd.width > 0) os << "  wire " << range(nd.width) << me << " = i;\n";
            break;
        case WKind::KeyInput:
            os << "  wire " << range(nd.width) << me << " = k;\n";
            break;
        case WKind::KeySlice: {
            os << "  wire " << range(nd.width) << me << " = {";
            for (int b = 0; b < int(nd.b); ++b)
                os << (b ? ", " : "") << "k[" << nd.a + b << "]";
            os << "};\n";
            break;
        }
        case WKind::Const:
            os << "  wire " << range(nd.width) << me << " = " << literal(nd.width, nd.a) << ";\n";
            break;
        case WKind::ConstMux: {
            os << "  reg " << range(nd.width) << me << ";\n";
            blk << "  always @(*) begin\n    case (" << op(0) << ")\n";
            for (size_t v = 0; v < nd.slot_values.size(); ++v) {
                blk << "      " << (v + 1 < nd.slot_values.size() ? std::to_string(v) : "default");
                blk << ": " << me << " = " << literal(nd.width, nd.slot_values[v]) << ";\n";
            }
            blk << "    endcase\n  end\n";
            always_blocks.push_back(blk.str());
            break;
        }
        case WKind::MuxN: {
            os << "  reg " << range(nd.width) << me << ";\n";
            blk << "  always @(*) begin\n    case (" << op(0) << ")\n";
            size_t inputs = nd.ops.size() - 1;
            for (size_t v = 0; v < inputs; ++v) {
                blk << "      " << (v + 1 < inputs ? std::to_string(v) : "default");
                blk << ": " << me << " = " << op(int(v) + 1) << ";\n";
            }
            blk << "    endcase\n  end\n";
            always_blocks.push_back(blk.str());
            break;
        }
        case WKind::SignExt: {
            int sw = w.nodes[size_t(nd.ops[0])].width;
            os << "  wire " << range(nd.width) << me << " = {{" << nd.width - sw << "{" << op(0)
               << "[" << sw - 1 << "]}}, " << op(0) << "};\n";
            break;
        }
        case WKind::ShiftL:
            os << "  wire " << range(nd.width) << me << " = " << op(0) << " << " << nd.a << ";\n";
            break;
        case WKind::Add:
            os << "  wire " << range(nd.width) << me << " = " << op(0) << " + " << op(1) << ";\n";
            break;
        case WKind::Sub:
            os << "  wire " << range(nd.width) << me << " = " << op(0) << " - " << op(1) << ";\n";
            break;
        case WKind::AddSub:
            os << "  wire " << range(nd.width) << me << " = " << op(2) << " ? " << op(0) << " - "
               << op(1) << " : " << op(0) << " + " << op(1) << ";\n";
            break;
        case WKind::Negate:
            os << "  wire " << range(nd.width) << me << " = " << op(1) << " ? -" << op(0) << " : "
               << op(0) << ";\n";
            break;
        case WKind::Mul:
            os << "  wire " << range(nd.width) << me << " = $signed("
               << wire_name(nd.ops[0]) << ") * $signed(" << wire_name(nd.ops[1]) << ");\n";
            break;
        case WKind::Encoder: {
            os << "  reg " << range(nd.width) << me << ";\n";
            blk << "  always @(*) begin\n    casez ({" << op(0);
            if (w.m > 0) blk << ", " << op(1);
            blk << "})\n";
            for (const EncoderRow& row : w.encoder.rows) {
                blk << "      " << w.p + w.m << "'b";
                for (int b = w.p - 1; b >= 0; --b)
                    blk << (row.key[size_t(b)] < 0 ? '?' : char('0' + row.key[size_t(b)]));
                for (int b = w.m - 1; b >= 0; --b) blk << char('0' + ((row.sel >> b) & 1));
                blk << ": " << me << " = " << literal(nd.width, row.g) << ";\n";
            }
            blk << "      default: " << me << " = " << literal(nd.width, 0) << ";\n";
            blk << "    endcase\n  end\n";
            always_blocks.push_back(blk.str());
            break;
        }
        case WKind::Ctl: {
            const CtlField& f = w.ctl_fields[size_t(nd.a)];
            os << "  reg " << range(nd.width) << me << "; // " << f.name << "\n";
            blk << "  always @(*) begin\n    case (" << op(0) << ")\n";
            for (size_t gv = 0; gv < f.values.size(); ++gv) {
                blk << "      " << (gv + 1 < f.values.size() ? std::to_string(gv) : "default");
                blk << ": " << me << " = " << literal(nd.width, int64_t(f.values[gv])) << ";\n";
            }
            blk << "    endcase\n  end\n";
            always_blocks.push_back(blk.str());
            break;
        }
        case WKind::Output:
            os << "  assign f = " << op(0) << ";\n";
            break;
        }
    }
    os << "\n";
    for (const std::string& blk : always_blocks) os << blk << "\n";
    os << "endmodule\n";
    return os.str();
}

std::string emit_verilog(const GateNetlist& g, const std::string& module_name) {
    std::ostringstream os;
    os << "module " << module_name << " (\n";
    if (!g.data_bits.empty()) os << "  input  " << range(int(g.data_bits.size())) << "x,\n";
    if (!g.sel_bits.empty()) os << "  input  " << range(int(g.sel_bits.size())) << "i,\n";
    if (!g.key_bits.empty()) os << "  input  " << range(int(g.key_bits.size())) << "k,\n";
    os << "  output " << range(int(g.outputs.size())) << "f\n";
    os << ");\n\n";

    auto net = [&](int32_t id) -> std::string {
        for (size_t b = 0; b < g.data_bits.size(); ++b)
            if (g.data_bits[b] == id) return "x[" + std::to_string(b) + "]";
        for (size_t b = 0; b < g.sel_bits.size(); ++b)
            if (g.sel_bits[b] == id) return "i[" + std::to_string(b) + "]";
        for (size_t b = 0; b < g.key_bits.size(); ++b)
            if (g.key_bits[b] == id) return "k[" + std::to_string(b) + "]";
        return "n" + std::to_string(id);
    };

    for (size_t i = 0; i < g.gates.size(); ++i)
        os << "  wire n" << g.num_inputs + int32_t(i) << ";\n";
    os << "\n";
    for (size_t i = 0; i < g.gates.size(); ++i) {
        const Gate& gt = g.gates[i];
        int32_t id = g.num_inputs + int32_t(i);
        std::string kind = gate_name(gt.kind);
        for (char& c : kind) c = char(tolower(c));
        os << "  " << kind << " g" << id << " (n" << id << ", " << net(gt.a);
        if (gt.kind != GKind::Not) os << ", " << net(gt.b);
        os << ");\n";
    }
    os << "\n";
    for (size_t b = 0; b < g.outputs.size(); ++b)
        os << "  assign f[" << b << "] = " << net(g.outputs[b]) << ";\n";
    os << "endmodule\n";
    return os.str();
}

std::string emit_verilog(const FoldedFir& f, const std::string& module_name) {
    const WordNetlist& w = f.tmcm;
    int N = f.taps;
    int cw = f.counter_width;
    int aw = f.acc_width;
    std::ostringstream os;
    os << "module " << module_name << " (\n";
    os << "  input  clk,\n  input  rst,\n";
    os << "  input  " << range(w.ibw) << "x,\n";
    if (w.p > 0) os << "  input  " << range(w.p) << "k,\n";
    os << "  output reg " << range(aw) << "y,\n";
    os << "  output reg y_valid\n";
    os << ");\n\n";
    os << "  reg " << range(cw) << "ts;\n";
    os << "  wire " << range(w.out_width) << "prod;\n";
    os << "  reg " << range(aw) << "chain [" << (N >= 2 ? N - 2 : 0) << ":0];\n";
    os << "  integer j;\n\n";
    os << "  " << module_name << "_tmcm core (.x(x)";
    if (w.m > 0) os << ", .i(ts" << (cw > w.m ? "[" + std::to_string(w.m - 1) + ":0]" : "") << ")";
    if (w.p > 0) os << ", .k(k)";
    os << ", .f(prod));\n\n";
    os << "  wire " << range(aw) << "tail = (ts == " << literal(cw, N - 1) << ") ? "
       << literal(aw, 0) << " : chain[" << N - 2 << "];\n";
    os << "  wire " << range(aw) << "sum = {{" << aw - w.out_width << "{prod[" << w.out_width - 1
       << "]}}, prod} + tail;\n\n";
    os << "  always @(posedge clk) begin\n";
    os << "    if (rst) begin\n";
    os << "      ts <= " << literal(cw, 0) << ";\n";
    os << "      y_valid <= 1'b0;\n";
    os << "      for (j = 0; j < " << N - 1 << "; j = j + 1) chain[j] <= " << literal(aw, 0) << ";\n";
    os << "    end else begin\n";
    os << "      for (j = " << N - 2 << "; j > 0; j = j - 1) chain[j] <= chain[j-1];\n";
    os << "      chain[0] <= sum;\n";
    os << "      if (ts == " << literal(cw, 0) << ") begin\n";
    os << "        y <= sum;\n        y_valid <= 1'b1;\n";
    os << "      end else begin\n        y_valid <= 1'b0;\n      end\n";
    os << "      ts <= (ts == " << literal(cw, N - 1) << ") ? " << literal(cw, 0) << " : ts + "
       << literal(cw, 1) << ";\n";
    os << "    end\n  end\n\nendmodule\n\n";
    os << emit_verilog(w, module_name + "_tmcm");
    return os.str();
}

std::string emit_testbench(const WordNetlist& w, const DecoyPlan& plan, int vectors,
                           const std::string& module_name) {
    std::ostringstream os;
    const ConstantSet& cs = plan.base;
    os << "`timescale 1ns/1ps\n";
    os << "module " << module_name << "_tb;\n";
    os << "  reg  " << range(w.ibw) << "x;\n";
    if (w.m > 0) os << "  reg  " << range(w.m) << "i;\n";
    if (w.p > 0) os << "  reg  " << range(w.p) << "k;\n";
    os << "  wire " << range(w.out_width) << "f;\n";
    os << "  reg signed " << range(w.out_width) << "expected;\n";
    os << "  integer v, errors;\n\n";
    os << "  " << module_name << " dut (.x(x)";
    if (w.m > 0) os << ", .i(i)";
    if (w.p > 0) os << ", .k(k)";
    os << ", .f(f));\n\n";
    os << "  function signed " << range(cs.mbw + 1) << "coeff;\n";
    os << "    input " << range(std::max(1, w.m)) << "sel;\n";
    os << "    case (sel)\n";
    for (int j = 0; j < cs.n; ++j) {
        os << "      " << (j + 1 < cs.n ? std::to_string(j) : "default") << ": coeff = "
           << literal(cs.mbw + 1, cs.targets[j]) << ";\n";
    }
    os << "    endcase\n  endfunction\n\n";
    os << "  initial begin\n";
    os << "    errors = 0;\n";
    if (w.p > 0) {
        os << "    k = " << w.p << "'b";
        for (int b = w.p - 1; b >= 0; --b) os << int(plan.correct_key.bits[size_t(b)]);
        os << "; // correct key\n";
    }
    os << "    for (v = 0; v < " << vectors << "; v = v + 1) begin\n";
    os << "      x = $random;\n";
    if (w.m > 0) os << "      i = $unsigned($random) % " << cs.n << ";\n";
    os << "      #1;\n";
    os << "      expected = $signed(coeff(" << (w.m > 0 ? "i" : std::to_string(0)) << ")) * $signed(x);\n";
    os << "      if ($signed(f) !== expected) begin\n";
    os << "        errors = errors + 1;\n";
    os << "        $display(\"MISMATCH x=%0d i=%0d f=%0d expected=%0d\", $signed(x), "
       << (w.m > 0 ? "i" : "0") << ", $signed(f), expected);\n";
    os << "      end\n";
    os << "    end\n";
    os << "    if (errors == 0) $display(\"PASS\");\n";
    os << "    else $display(\"FAIL %0d\", errors);\n";
    os << "    $finish;\n  end\nendmodule\n";
    return os.str();
}

GateNetlist parse_structural_verilog(const std::string& text) {
    // Accepts only the structural form produced by emit_verilog(GateNetlist).
    std::istringstream is(text);
    std::string line;
    int xw = 0, iw = 0, kw = 0;
    struct Inst {
        std::string kind;
        std::string out;
        std::vector<std::string> args;
    };
    std::vector<Inst> insts;
    std::vector<std::pair<int, std::string>> assigns; // f bit -> net name

    auto parse_width = [](const std::string& s) {
        auto lb = s.find('[');
        if (lb == std::string::npos) return 1;
        return std::stoi(s.substr(lb + 1, s.find(':') - lb - 1)) + 1;
    };

    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "input") {
            std::string rest;
            std::getline(ls, rest);
            if (rest.find(" x") != std::string::npos) xw = parse_width(rest);
            else if (rest.find(" i") != std::string::npos) iw = parse_width(rest);
            else if (rest.find(" k") != std::string::npos) kw = parse_width(rest);
        } else if (tok == "and" || tok == "or" || tok == "xor" || tok == "not" || tok == "nand" ||
                   tok == "nor") {
            Inst inst;
            inst.kind = tok;
            std::string rest;
            std::getline(ls, rest);
            auto lp = rest.find('(');
            auto rp = rest.rfind(')');
            std::istringstream as(rest.substr(lp + 1, rp - lp - 1));
            std::string a;
            bool first = true;
            while (std::getline(as, a, ',')) {
                a.erase(0, a.find_first_not_of(" \t"));
                a.erase(a.find_last_not_of(" \t") + 1);
                if (first) {
                    inst.out = a;
                    first = false;
                } else {
                    inst.args.push_back(a);
                }
            }
            insts.push_back(std::move(inst));
        } else if (tok == "assign") {
            std::string lhs, eq, rhs;
            ls >> lhs >> eq >> rhs;
            if (rhs.back() == ';') rhs.pop_back();
            auto lb = lhs.find('[');
            int bit = std::stoi(lhs.substr(lb + 1, lhs.find(']') - lb - 1));
            assigns.emplace_back(bit, rhs);
        }
    }

    GateNetlist g;
    g.num_inputs = xw + iw + kw;
    int32_t net = 0;
    for (int b = 0; b < xw; ++b) g.data_bits.push_back(net++);
    for (int b = 0; b < iw; ++b) g.sel_bits.push_back(net++);
    for (int b = 0; b < kw; ++b) g.key_bits.push_back(net++);

    std::map<std::string, int32_t> net_of;
    for (int b = 0; b < xw; ++b) net_of["x[" + std::to_string(b) + "]"] = g.data_bits[size_t(b)];
    for (int b = 0; b < iw; ++b) net_of["i[" + std::to_string(b) + "]"] = g.sel_bits[size_t(b)];
    for (int b = 0; b < kw; ++b) net_of["k[" + std::to_string(b) + "]"] = g.key_bits[size_t(b)];

    for (const Inst& inst : insts) {
        GKind k;
        if (inst.kind == "and") k = GKind::And;
        else if (inst.kind == "or") k = GKind::Or;
        else if (inst.kind == "xor") k = GKind::Xor;
        else if (inst.kind == "not") k = GKind::Not;
        else if (inst.kind == "nand") k = GKind::Nand;
        else k = GKind::Nor;
        auto need = [&](const std::string& nm) {
            auto it = net_of.find(nm);
            if (it == net_of.end())
                throw std::runtime_error("structural verilog: undriven net " + nm);
            return it->second;
        };
        int32_t out = k == GKind::Not ? g.add_gate(k, need(inst.args.at(0)))
                                      : g.add_gate(k, need(inst.args.at(0)), need(inst.args.at(1)));
        net_of[inst.out] = out;
    }
    g.outputs.resize(assigns.size());
    for (auto& [bit, nm] : assigns) {
        auto it = net_of.find(nm);
        if (it == net_of.end()) throw std::runtime_error("structural verilog: undriven net " + nm);
        g.outputs[size_t(bit)] = it->second;
    }
    return g;
}

} // namespace tmcm
