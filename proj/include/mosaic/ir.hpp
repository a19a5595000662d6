#pragma once

#include "mosaic/isa.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mosaic {

struct ParseError : std::runtime_error {
    int line;
    int col;
    ParseError(int l, int c, const std::string& msg)
        : std::runtime_error("line " + std::to_string(l) + ":" + std::to_string(c) + ": " + msg),
          line(l), col(c) {}
};

struct SemanticError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Role { Def, Use };

struct Operand {
    Role role;
    int temp; // index into Function::temps
    std::optional<RegId> precolor;
};

struct Instruction {
    int id = -1;
    std::vector<int> opcode_alts; // indices into IsaTable::opcodes, non-empty
    std::vector<Operand> operands; // defs first, then uses
    std::vector<int64_t> imms;
    std::vector<int> labels; // successor block ids
    int block = -1;

    const OperandShape& shape(const IsaTable& isa) const { return isa.op(opcode_alts[0]).shape; }
    bool is_branch(const IsaTable& isa) const { return isa.op(opcode_alts[0]).branch(); }
    bool is_indirect_branch(const IsaTable& isa) const { return isa.op(opcode_alts[0]).indirect_branch; }
    int max_latency(const IsaTable& isa) const {
        int m = 0;
        for (int a : opcode_alts) m = std::max(m, isa.op(a).latency);
        return m;
    }
    int min_latency(const IsaTable& isa) const {
        int m = 1 << 20;
        for (int a : opcode_alts) m = std::min(m, isa.op(a).latency);
        return m;
    }
};

struct TempInfo {
    int id = -1;
    std::string name;
    std::vector<int> def_instructions; // in program order
    std::vector<int> use_instructions; // in program order
    bool global = false;               // used or defined in more than one block
    std::optional<RegId> precolor;
};

enum class DepKind { Flow, Anti, Output, Explicit };

struct Dependency {
    int producer;
    int consumer;
    int temp; // -1 for Explicit
    DepKind kind;
};

struct Block {
    int id = -1;
    int freq = 1;
    std::vector<int> successors;   // block ids
    std::vector<int> instructions; // instruction ids in program order
    // Computed by analyze(): block-level liveness over temp indices.
    std::set<int> live_in;
    std::set<int> live_out;
};

struct Function {
    std::string name;
    std::vector<Block> blocks;             // function order
    std::vector<Instruction> instructions; // indexed by id
    std::vector<TempInfo> temps;
    std::vector<Dependency> dependencies;

    // Flattened register-operand indexing: operand p of instruction i has
    // global index operand_base[i] + p.
    std::vector<int> operand_base;
    int num_operands = 0;

    int block_index(int block_id) const {
        for (size_t i = 0; i < blocks.size(); ++i)
            if (blocks[i].id == block_id) return static_cast<int>(i);
        return -1;
    }
    const Block& block_of(const Instruction& ins) const {
        return blocks[static_cast<size_t>(block_index(ins.block))];
    }
    int temp_index(const std::string& name) const {
        for (size_t i = 0; i < temps.size(); ++i)
            if (temps[i].name == name) return static_cast<int>(i);
        return -1;
    }
};

// Parses the textual IR format. Throws ParseError / SemanticError.
Function parse_function(const std::string& text, const IsaTable& isa);

// Canonical textual form; parse_function(serialize_function(fn)) == fn.
std::string serialize_function(const Function& fn, const IsaTable& isa);

// Recomputes operand indexing, def/use lists, global flags, block liveness
// and the dependency list. Called by the parser; exposed for tests that
// build Functions programmatically.
void analyze(Function& fn, const IsaTable& isa);

bool functions_equal(const Function& a, const Function& b);

} // namespace mosaic
