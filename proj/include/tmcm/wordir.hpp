#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tmcm {

// Row of the encoder: a key pattern with don't cares plus a fully specified
// primary select value, mapped to the global constant index g.
struct EncoderRow {
    std::vector<int8_t> key; // length p, entries 0 / 1 / -1 (don't care)
    int sel = 0;             // primary select value i
    int g = 0;
};

struct EncoderTable {
    std::vector<EncoderRow> rows;
    std::vector<int64_t> order; // global constant order, index = g
    int p = 0;
    int m = 0;
    int g_width = 0;

    int lookup(const std::vector<uint8_t>& key_bits, int sel) const;
    std::string to_text() const;
};

// Per-stage datapath control for one g value of the shift-add datapath,
// kept as plain data; gate lowering turns each field into two-level AND-OR
// logic.
struct SelectStageCtl {
    bool bypass = false;
    bool subtract = false;
    int shift_sel = 0; // index into SelectTable::shifts
};

struct SelectRow {
    int g = 0;
    int base_shift_sel = 0;
    bool base_negate = false;
    std::vector<SelectStageCtl> stages;
};

struct SelectTable {
    std::vector<SelectRow> rows; // indexed by g
    std::vector<int> shifts;     // distinct left-shift amounts of the datapath
    int stage_count = 0;         // add/sub stages after the base operand

    std::string to_text() const;
};

enum class WKind {
    DataInput,  // width = ibw
    SelectInput,// width = m
    KeyInput,   // width = p
    KeySlice,   // key group as an integer, lowest key index = MSB; a=off, b=len
    Const,      // value in aux
    ConstMux,   // operand 0 = select, slot values in slot_values
    MuxN,       // operand 0 = select, then inputs; select clamps to last input
    SignExt,
    ShiftL,     // a = amount, within declared width
    Add,
    Sub,
    AddSub,     // operands: a, b, sign (1 bit); sign 1 subtracts
    Negate,     // operands: src, sign (1 bit)
    Mul,        // signed, width = wa + wb
    Encoder,    // operands: key, select; uses WordNetlist::encoder
    Ctl,        // control field lookup by g; a = field index
    Output,
};

struct WNode {
    WKind kind{};
    int width = 0;
    std::vector<int> ops; // operand node ids
    int64_t a = 0, b = 0; // kind-specific immediates
    std::vector<int64_t> slot_values;
};

// Control field materialized as a per-g value table.
struct CtlField {
    std::string name;
    int width = 0;
    std::vector<uint64_t> values; // indexed by g
};

struct WordNetlist {
    std::string arch; // "tmcm-mul" | "tmcm-sa" | "tmcm-plain"
    int ibw = 0, m = 0, p = 0;
    int out_width = 0;
    int n = 0;
    std::vector<WNode> nodes; // topological order
    std::vector<int> outputs; // node ids
    EncoderTable encoder;     // used by Encoder nodes (tmcm-sa)
    SelectTable select;       // documentation/table export (tmcm-sa)
    std::vector<CtlField> ctl_fields;
    uint64_t plan_hash = 0;

    int add_node(WNode n);
};

// Evaluates the combinational netlist. Inputs are exact integers; the result
// is asserted to fit out_width bits two's complement.
int64_t eval_word(const WordNetlist& w, int64_t x, int sel, const std::vector<uint8_t>& key);

} // namespace tmcm
