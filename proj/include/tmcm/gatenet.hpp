#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tmcm {

enum class GKind : uint8_t { And, Or, Xor, Not, Nand, Nor };

const char* gate_name(GKind k);

struct Gate {
    GKind kind{};
    int32_t a = 0, b = 0; // fanin nets; b unused for Not
};

// Bit-level combinational netlist. Nets 0..num_inputs-1 are primary inputs;
// gate i drives net num_inputs + i. Construction order is topological.
struct GateNetlist {
    int32_t num_inputs = 0;
    std::vector<int32_t> data_bits; // x, LSB first
    std::vector<int32_t> sel_bits;  // i, LSB first
    std::vector<int32_t> key_bits;  // k_0..k_{p-1}
    std::vector<Gate> gates;
    std::vector<int32_t> outputs; // LSB first

    int32_t net_count() const { return num_inputs + int32_t(gates.size()); }
    int32_t add_gate(GKind k, int32_t a, int32_t b = 0);

    std::string net_label(int32_t net) const; // stable textual name
};

struct GateStats {
    int64_t gate_count = 0;
    int depth = 0;
    int key_count = 0;
};

GateStats stats(const GateNetlist& g);

// Single-vector evaluation; assignment indexed by net id for inputs.
std::vector<uint8_t> eval_gates(const GateNetlist& g, const std::vector<uint8_t>& inputs);

// 64 vectors per call, one per bit lane.
std::vector<uint64_t> eval_gates_packed(const GateNetlist& g, const std::vector<uint64_t>& inputs);

// Packs (x, i, key) into an input assignment, LSB first, two's complement x.
std::vector<uint8_t> pack_inputs(const GateNetlist& g, int64_t x, int sel,
                                 const std::vector<uint8_t>& key);
int64_t unpack_output(const GateNetlist& g, const std::vector<uint8_t>& bits);

// bench-style text: one gate per line, `name = GATE(a, b)`.
std::string to_bench(const GateNetlist& g);
GateNetlist from_bench(const std::string& text);

} // namespace tmcm
