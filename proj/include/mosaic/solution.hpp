#pragma once

#include <cstdint>
#include <vector>

namespace mosaic {

// One complete assignment of the decision variables: issue cycles and
// implementation choice per instruction, register per operand (flattened
// operand indexing as in Function::operand_base).
struct SolutionAssignment {
    std::vector<int> cycles;
    std::vector<int> impls; // index into Instruction::opcode_alts
    std::vector<int> regs;
    long long cost = 0;

    bool operator==(const SolutionAssignment& o) const {
        return cycles == o.cycles && impls == o.impls && regs == o.regs;
    }
    bool operator<(const SolutionAssignment& o) const {
        if (cycles != o.cycles) return cycles < o.cycles;
        if (impls != o.impls) return impls < o.impls;
        return regs < o.regs;
    }
};

} // namespace mosaic
