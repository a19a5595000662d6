#pragma once

// Test-only oracles, written directly against the Function semantics and
// kept independent of the model/solver implementation they check.

#include "mosaic/bench.hpp"
#include "mosaic/ir.hpp"
#include "mosaic/solution.hpp"

#include <climits>
#include <vector>

namespace mosaic::oracle {

struct Options {
    long long cost_bound = LLONG_MAX; // keep solutions with cost <= bound
    size_t max_solutions = SIZE_MAX;  // safety valve for tests
};

// Every feasible (cycles, impls, regs) assignment by exhaustive enumeration.
std::vector<SolutionAssignment> enumerate_solutions(const Function& fn, const IsaTable& isa,
                                                    const Options& opt = {});

// Minimum cost over all feasible assignments (branch-and-bound enumeration).
long long min_cost(const Function& fn, const IsaTable& isa);

// Naive reimplementations of the distance measures.
long long naive_hd(const SolutionAssignment& a, const SolutionAssignment& b);
long long naive_ld(const SolutionAssignment& a, const SolutionAssignment& b, const Function& fn);
long long naive_gd(const SolutionAssignment& a, const SolutionAssignment& b, const Function& fn,
                   const IsaTable& isa, int n_r, int n_c);
double naive_pairwise_hd(const std::vector<SolutionAssignment>& sols);

// Shared helper: load a bundled benchmark by id.
Function load_bench(const std::string& id);

} // namespace mosaic::oracle
