#include "mosaic/isa.hpp"

namespace mosaic {

void IsaTable::finalize() {
    by_name_.clear();
    nop_idx_ = -1;
    for (size_t i = 0; i < opcodes.size(); ++i) {
        const Opcode& oc = opcodes[i];
        if (oc.latency < 1) throw std::invalid_argument("opcode " + oc.name + ": latency must be >= 1");
        if (oc.size != 4) throw std::invalid_argument("opcode " + oc.name + ": size must be 4");
        if (oc.indirect_branch && oc.direct_branch)
            throw std::invalid_argument("opcode " + oc.name + ": branch flags are exclusive");
        if (oc.shape.defs > 1) throw std::invalid_argument("opcode " + oc.name + ": at most one def");
        if (!by_name_.emplace(oc.name, static_cast<int>(i)).second)
            throw std::invalid_argument("duplicate opcode name " + oc.name);
        if (oc.is_nop) nop_idx_ = static_cast<int>(i);
    }
    for (RegId r : allocatable)
        if (reserved.count(r))
            throw std::invalid_argument("register r" + std::to_string(r) + " both allocatable and reserved");
    for (auto& [name, alts] : aliases) {
        if (alts.empty()) throw std::invalid_argument("alias " + name + " has no alternatives");
        const OperandShape& s = op(alts[0]).shape;
        for (int a : alts)
            if (!(op(a).shape == s))
                throw std::invalid_argument("alias " + name + ": alternatives disagree on operand shape");
    }
    if (nop_idx_ < 0) throw std::invalid_argument("ISA table has no nop opcode");
}

const IsaTable& mini_mips() {
    static const IsaTable table = [] {
        IsaTable t;
        auto add = [&t](std::string name, std::string mnem, OperandShape sh, int lat,
                        std::string emit, bool ind = false, bool dir = false, bool nop = false) {
            Opcode oc;
            oc.name = std::move(name);
            oc.mnemonic = std::move(mnem);
            oc.shape = sh;
            oc.latency = lat;
            oc.indirect_branch = ind;
            oc.direct_branch = dir;
            oc.is_nop = nop;
            oc.emit = std::move(emit);
            t.opcodes.push_back(std::move(oc));
        };
        add("add", "add", {1, 2, 0, 0}, 1, "add {d0}, {u0}, {u1}");
        add("sub", "sub", {1, 2, 0, 0}, 1, "sub {d0}, {u0}, {u1}");
        add("or", "or", {1, 2, 0, 0}, 1, "or {d0}, {u0}, {u1}");
        add("mul", "mul", {1, 2, 0, 0}, 2, "mul {d0}, {u0}, {u1}");
        add("slti", "slti", {1, 1, 1, 0}, 1, "slti {d0}, {u0}, {i0}");
        add("addi", "addi", {1, 1, 1, 0}, 1, "addi {d0}, {u0}, {i0}");
        add("sll", "sll", {1, 1, 1, 0}, 1, "sll {d0}, {u0}, {i0}");
        add("lw", "lw", {1, 1, 1, 0}, 2, "lw {d0}, {i0}({u0})");
        add("sw", "sw", {0, 2, 1, 0}, 1, "sw {u0}, {i0}({u1})");
        add("li", "li", {1, 0, 1, 0}, 1, "li {d0}, {i0}");
        // The two implementations of an abstract register move.
        add("copy.addi", "addi", {1, 1, 0, 0}, 1, "addi {d0}, {u0}, 0");
        add("copy.or", "or", {1, 1, 0, 0}, 1, "or {d0}, {u0}, r0");
        add("b", "b", {0, 0, 0, 1}, 1, "b {l0}", false, true);
        add("beq", "beq", {0, 1, 0, 1}, 1, "beq {u0}, {l0}", false, true);
        add("blez", "blez", {0, 1, 0, 1}, 1, "blez {u0}, {l0}", false, true);
        add("jr", "jr", {0, 1, 0, 0}, 1, "jr {u0}", true);
        add("jalr", "jalr", {1, 1, 0, 0}, 1, "jalr {d0}, {u0}", true);
        add("nop", "nop", {0, 0, 0, 0}, 1, "nop", false, false, true);
        for (RegId r = 1; r <= 12; ++r) t.allocatable.push_back(r);
        t.reserved = {0, 13};
        auto find = [&t](const std::string& n) {
            for (size_t i = 0; i < t.opcodes.size(); ++i)
                if (t.opcodes[i].name == n) return static_cast<int>(i);
            throw std::logic_error("missing opcode " + n);
        };
        t.aliases["copy"] = {find("copy.addi"), find("copy.or")};
        t.finalize();
        return t;
    }();
    return table;
}

std::string reg_name(RegId r) { return "r" + std::to_string(r); }

} // namespace mosaic
