#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace mosaic {

using RegId = int;

// Operand slot counts shared by all alternatives of an instruction.
struct OperandShape {
    int defs = 0;
    int uses = 0;
    int imms = 0;
    int labels = 0;

    bool operator==(const OperandShape&) const = default;
};

struct Opcode {
    std::string name;     // name used in IR text
    std::string mnemonic; // mnemonic emitted in assembly
    OperandShape shape;
    int latency = 1;
    int size = 4;
    bool indirect_branch = false;
    bool direct_branch = false;
    bool is_nop = false;
    // Emission template with {d0} {u0} {i0} {l0} placeholders. Extra fixed
    // tokens (e.g. the zero register of an "or" move) live only here.
    std::string emit;

    bool branch() const { return indirect_branch || direct_branch; }
};

class IsaTable {
public:
    std::vector<Opcode> opcodes;
    std::vector<RegId> allocatable; // ordered
    std::set<RegId> reserved;
    // IR-level aliases expanding to several alternatives, e.g. "copy".
    std::unordered_map<std::string, std::vector<int>> aliases;

    int opcode_index(const std::string& name) const {
        auto it = by_name_.find(name);
        return it == by_name_.end() ? -1 : it->second;
    }
    const Opcode& op(int idx) const { return opcodes.at(static_cast<size_t>(idx)); }
    int nop_opcode() const { return nop_idx_; }

    bool is_allocatable(RegId r) const {
        for (RegId a : allocatable)
            if (a == r) return true;
        return false;
    }
    bool is_register(RegId r) const { return is_allocatable(r) || reserved.count(r) > 0; }

    // Re-derives lookup tables and checks the table invariants.
    void finalize();

private:
    std::unordered_map<std::string, int> by_name_;
    int nop_idx_ = -1;
};

// The default "mini-MIPS" table: fixed 4-byte instructions, 12 allocatable
// registers r1..r12, r0 hard-zero and r13 reserved.
const IsaTable& mini_mips();

std::string reg_name(RegId r);

} // namespace mosaic
