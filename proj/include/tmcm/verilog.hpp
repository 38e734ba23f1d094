#pragma once

#include <string>

#include "tmcm/decoy.hpp"
#include "tmcm/gatenet.hpp"
#include "tmcm/tmcm.hpp"
#include "tmcm/wordir.hpp"

namespace tmcm {

// Behavioral Verilog-2001 for a word-level design. Ports: x, i, k, f.
std::string emit_verilog(const WordNetlist& w, const std::string& module_name = "tmcm");

// Structural Verilog: one primitive gate instance per GateNetlist gate.
std::string emit_verilog(const GateNetlist& g, const std::string& module_name = "tmcm_gates");

// Sequential folded FIR wrapper instantiating the behavioral TMCM core.
std::string emit_verilog(const FoldedFir& f, const std::string& module_name = "folded_fir");

// Self-checking testbench: applies the correct key and `vectors` random
// inputs, comparing against the expected constant products.
std::string emit_testbench(const WordNetlist& w, const DecoyPlan& plan, int vectors,
                           const std::string& module_name = "tmcm");

// Reads back the structural form emitted above.
GateNetlist parse_structural_verilog(const std::string& text);

} // namespace tmcm
