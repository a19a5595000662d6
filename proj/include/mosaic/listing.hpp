#pragma once

#include "mosaic/ir.hpp"
#include "mosaic/solution.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mosaic {

struct AsmLine {
    uint32_t address = 0;
    std::string mnemonic;
    std::vector<std::string> ops;

    bool operator==(const AsmLine&) const = default;
};

struct AssemblyListing {
    uint32_t base = 0;
    std::vector<AsmLine> lines; // addresses are base + 4*index
};

// Emits the scheduled instructions of a complete solution: blocks in
// function order, one line per cycle, empty cycles filled with nops,
// branch targets resolved to absolute addresses.
AssemblyListing linearize(const Function& fn, const SolutionAssignment& sol, const IsaTable& isa,
                          uint32_t base = 0);

std::string print_listing(const AssemblyListing& listing);
AssemblyListing parse_listing(const std::string& text);

// Per-block makespans (cycle of the final branch) of a complete solution.
std::vector<int> block_makespans(const Function& fn, const SolutionAssignment& sol);

} // namespace mosaic
