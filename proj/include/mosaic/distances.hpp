#pragma once

#include "mosaic/ir.hpp"
#include "mosaic/model.hpp"
#include "mosaic/solution.hpp"

#include <string>
#include <vector>

namespace mosaic {

enum class DistanceKind { HD, LD, GD };

struct DistanceSpec {
    DistanceKind kind = DistanceKind::HD;
    int n_r = 0; // register window (GD)
    int n_c = 8; // schedule window (GD)
    long long h = 1;
};

DistanceKind distance_kind_from(const std::string& name);
std::string distance_name(const DistanceSpec& spec);

// Instruction ids ordered by issue cycle, blocks in function order; -1
// marks an empty cycle (a nop slot in the emitted code).
using Channel = std::vector<int>;

Channel channel(const SolutionAssignment& sol, const Function& fn);

// Hamming distance over the issue-cycle vectors.
long long hamming(const SolutionAssignment& s1, const SolutionAssignment& s2);

// Edit distance between token sequences, unit costs.
long long levenshtein_tokens(const std::vector<int>& a, const std::vector<int>& b);

long long levenshtein(const SolutionAssignment& s1, const SolutionAssignment& s2, const Function& fn);

// One-sided gadget distance: windows are defined by s1's schedule.
long long gadget_distance(const SolutionAssignment& s1, const SolutionAssignment& s2,
                          const Function& fn, const IsaTable& isa, int n_r, int n_c);

// Measurement form of the configured distance; GD is symmetrized as
// max(delta(s1,s2), delta(s2,s1)).
long long distance(const SolutionAssignment& s1, const SolutionAssignment& s2,
                   const DistanceSpec& spec, const Function& fn, const IsaTable& isa);

// Constraint-side form: one-sided for GD, with windows from the incumbent
// (first argument), exactly as posted into the model.
long long constraint_distance(const SolutionAssignment& incumbent, const SolutionAssignment& cand,
                              const DistanceSpec& spec, const Function& fn, const IsaTable& isa);

// Mean pairwise distance d over all unordered pairs.
double pairwise_distance(const std::vector<SolutionAssignment>& solutions, const DistanceSpec& spec,
                         const Function& fn, const IsaTable& isa);

// Adds "distance to sol >= h" to the model: a weighted sum of reified
// disequalities for HD/GD, a full-assignment check for LD.
void post_distance_constraint(ConstraintModel& model, const SolutionAssignment& sol,
                              const DistanceSpec& spec, const Function& fn, const IsaTable& isa);

} // namespace mosaic
