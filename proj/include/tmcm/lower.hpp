#pragma once

#include "tmcm/gatenet.hpp"
#include "tmcm/wordir.hpp"

namespace tmcm {

// Bit-accurate lowering of a combinational word netlist: ripple-carry
// arithmetic, 2:1 mux trees, tables as two-level AND-OR logic, and a
// sign-extended shift-add multiplier.
GateNetlist lower_to_gates(const WordNetlist& w);

} // namespace tmcm
