#pragma once

#include "mosaic/ir.hpp"
#include "mosaic/solution.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mosaic {

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// var ids: cycle var of instruction i = i, impl var = n + i,
// register class var of temp t = 2n + t.
struct Precedence {
    int before; // instruction id
    int after;  // instruction id
    bool unit;  // true: c_after >= c_before + 1, else + latency(m_before)
};

// Closed live interval of one temp within one block, as a function of the
// schedule. start = 0 when the temp is live-in, otherwise min of start_vars;
// end = max of end_vars (the block's branch when live-out).
struct LiveInterval {
    bool from_block_start = false;
    std::vector<int> start_vars; // cycle var ids
    std::vector<int> end_vars;   // cycle var ids, non-empty
};

struct InterferencePair {
    int class_a; // reg class var id
    int class_b;
    LiveInterval a;
    LiveInterval b;
};

struct Objective {
    // cost = sum coeff_i * var_i + constant
    std::vector<std::pair<int, long long>> terms; // (cycle var id, freq)
    long long constant = 0;
    std::optional<long long> bound; // O <= bound when set
};

// sum over terms of weight * [var != value] >= min_sum
struct DiffSumCon {
    struct Term {
        int var;
        int value;
        long long weight;
    };
    std::vector<Term> terms;
    long long min_sum = 1;
};

// Full-assignment check: channel edit distance to a stored channel >= h.
struct LdCheckCon {
    std::vector<int> incumbent_channel; // -1 tokens are empty slots
    long long h = 1;
};

class ConstraintModel {
public:
    int num_insts = 0;
    int num_classes = 0;

    std::vector<std::vector<int>> domains; // initial domain per var id

    // structure
    std::vector<int> block_of_inst;            // block index per instruction
    std::vector<std::vector<int>> block_insts; // instruction ids per block index
    std::vector<long long> block_freq;
    std::vector<int> block_horizon;
    std::vector<int> last_branch;                // instruction id per block
    std::vector<std::vector<int>> alt_latencies; // per instruction, per alternative
    std::vector<std::vector<bool>> alt_branch;   // all alternatives agree; kept per inst
    std::vector<int> class_of_operand;           // flattened operand -> class id

    // constraints
    std::vector<Precedence> precedences;
    std::vector<std::vector<int>> alldiff_groups;
    std::vector<InterferencePair> interference;
    Objective objective;
    std::vector<DiffSumCon> diff_sums;
    std::vector<LdCheckCon> ld_checks;

    int num_vars() const { return 2 * num_insts + num_classes; }
    int cycle_var(int inst) const { return inst; }
    int impl_var(int inst) const { return num_insts + inst; }
    int class_var(int cls) const { return 2 * num_insts + cls; }

    long long eval_objective(const std::vector<int>& cycles) const {
        long long total = objective.constant;
        for (auto [v, c] : objective.terms) total += c * cycles[static_cast<size_t>(v)];
        return total;
    }

    // Expands per-class register values into the per-operand vector.
    std::vector<int> expand_regs(const std::vector<int>& class_values) const {
        std::vector<int> out(class_of_operand.size());
        for (size_t i = 0; i < out.size(); ++i)
            out[i] = class_values[static_cast<size_t>(class_of_operand[i])];
        return out;
    }
};

ConstraintModel build_model(const Function& fn, const IsaTable& isa);

long long evaluate_cost(const Function& fn, const SolutionAssignment& sol);

// Integer bound floor((1+p)*o); p is quantized to millionths so the result
// does not depend on floating-point rounding.
long long gap_bound(long long o, double p);

void post_gap_constraint(ConstraintModel& model, long long o, double p);

// Independent re-check of every model invariant, written directly against
// the Function semantics (no ConstraintModel involved). Returns human
// readable violations; empty result means the solution is valid.
std::vector<std::string> validate_solution(const Function& fn, const IsaTable& isa,
                                           const SolutionAssignment& sol,
                                           std::optional<long long> cost_bound = std::nullopt);

} // namespace mosaic
