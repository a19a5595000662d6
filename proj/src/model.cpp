#include "mosaic/model.hpp"

#include "mosaic/listing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace mosaic {

namespace {

// Temps with a live segment inside a block, by the block-level liveness
// classes: live-in, live-out, or locally defined/used.
struct Presence {
    bool live_in = false;
    bool live_out = false;
    std::vector<int> defs; // instruction ids in this block
    std::vector<int> uses;
    bool any() const { return live_in || live_out || !defs.empty() || !uses.empty(); }
};

std::map<int, Presence> block_presence(const Function& fn, const Block& b) {
    std::map<int, Presence> present;
    for (int t : b.live_in) present[t].live_in = true;
    for (int t : b.live_out) present[t].live_out = true;
    for (int id : b.instructions) {
        const Instruction& ins = fn.instructions[static_cast<size_t>(id)];
        for (const Operand& op : ins.operands) {
            if (op.role == Role::Def)
                present[op.temp].defs.push_back(id);
            else
                present[op.temp].uses.push_back(id);
        }
    }
    return present;
}

LiveInterval make_interval(const Presence& p, int branch_inst) {
    LiveInterval iv;
    if (p.live_in) {
        iv.from_block_start = true;
    } else {
        iv.start_vars = p.defs; // min over defs
        if (iv.start_vars.empty()) iv.start_vars = p.uses; // uses of a live-in temp: unreachable here
    }
    if (p.live_out) {
        iv.end_vars = {branch_inst};
    } else {
        iv.end_vars = p.uses;
        iv.end_vars.insert(iv.end_vars.end(), p.defs.begin(), p.defs.end());
    }
    return iv;
}

} // namespace

ConstraintModel build_model(const Function& fn, const IsaTable& isa) {
    ConstraintModel m;
    m.num_insts = static_cast<int>(fn.instructions.size());
    m.num_classes = static_cast<int>(fn.temps.size());
    m.domains.resize(static_cast<size_t>(m.num_vars()));

    m.block_of_inst.resize(static_cast<size_t>(m.num_insts));
    m.block_insts.resize(fn.blocks.size());
    m.block_freq.resize(fn.blocks.size());
    m.block_horizon.resize(fn.blocks.size());
    m.last_branch.resize(fn.blocks.size());
    m.alt_latencies.resize(static_cast<size_t>(m.num_insts));
    m.alt_branch.resize(static_cast<size_t>(m.num_insts));

    for (size_t bi = 0; bi < fn.blocks.size(); ++bi) {
        const Block& b = fn.blocks[bi];
        m.block_freq[bi] = b.freq;
        int horizon = 0;
        for (int id : b.instructions) {
            const Instruction& ins = fn.instructions[static_cast<size_t>(id)];
            horizon += ins.max_latency(isa);
            m.block_of_inst[static_cast<size_t>(id)] = static_cast<int>(bi);
            m.block_insts[bi].push_back(id);
        }
        horizon += static_cast<int>(b.instructions.size()); // slack admits nop padding
        if (horizon > 255)
            throw ModelError(fn.name + ": block " + std::to_string(b.id) + " exceeds the cycle horizon limit");
        m.block_horizon[bi] = horizon;
        m.last_branch[bi] = b.instructions.back();
    }

    for (const Instruction& ins : fn.instructions) {
        int bi = m.block_of_inst[static_cast<size_t>(ins.id)];
        std::vector<int> dom;
        for (int c = 0; c <= m.block_horizon[static_cast<size_t>(bi)]; ++c) dom.push_back(c);
        m.domains[static_cast<size_t>(m.cycle_var(ins.id))] = std::move(dom);
        std::vector<int> impls;
        for (size_t a = 0; a < ins.opcode_alts.size(); ++a) impls.push_back(static_cast<int>(a));
        m.domains[static_cast<size_t>(m.impl_var(ins.id))] = std::move(impls);
        for (int a : ins.opcode_alts) m.alt_latencies[static_cast<size_t>(ins.id)].push_back(isa.op(a).latency);
        m.alt_branch[static_cast<size_t>(ins.id)].assign(ins.opcode_alts.size(), ins.is_branch(isa));
    }

    // single-issue pigeonhole: the block's final branch cannot issue before
    // all other instructions have had distinct cycles
    for (size_t bi = 0; bi < fn.blocks.size(); ++bi) {
        int lb = static_cast<int>(m.block_insts[bi].size()) - 1;
        auto& dom = m.domains[static_cast<size_t>(m.cycle_var(m.last_branch[bi]))];
        dom.erase(std::remove_if(dom.begin(), dom.end(), [lb](int c) { return c < lb; }), dom.end());
    }

    for (const TempInfo& t : fn.temps) {
        std::vector<int>& dom = m.domains[static_cast<size_t>(m.class_var(t.id))];
        if (t.precolor)
            dom = {*t.precolor};
        else
            dom.assign(isa.allocatable.begin(), isa.allocatable.end());
    }

    m.class_of_operand.resize(static_cast<size_t>(fn.num_operands));
    for (const Instruction& ins : fn.instructions)
        for (size_t o = 0; o < ins.operands.size(); ++o)
            m.class_of_operand[static_cast<size_t>(fn.operand_base[static_cast<size_t>(ins.id)]) + o] =
                ins.operands[o].temp;

    // data dependencies
    for (const Dependency& d : fn.dependencies)
        m.precedences.push_back({d.producer, d.consumer, d.kind == DepKind::Anti});

    // branch tail: non-branches strictly before the first branch, branches
    // keep program order
    for (const Block& b : fn.blocks) {
        int first_branch = -1;
        int prev_branch = -1;
        for (int id : b.instructions) {
            if (fn.instructions[static_cast<size_t>(id)].is_branch(isa)) {
                if (first_branch < 0) first_branch = id;
                if (prev_branch >= 0) m.precedences.push_back({prev_branch, id, true});
                prev_branch = id;
            }
        }
        for (int id : b.instructions)
            if (!fn.instructions[static_cast<size_t>(id)].is_branch(isa))
                m.precedences.push_back({id, first_branch, true});
    }

    for (size_t bi = 0; bi < fn.blocks.size(); ++bi) {
        std::vector<int> group;
        for (int id : m.block_insts[bi]) group.push_back(m.cycle_var(id));
        m.alldiff_groups.push_back(std::move(group));
    }

    // schedule-dependent register interference
    for (size_t bi = 0; bi < fn.blocks.size(); ++bi) {
        const Block& b = fn.blocks[bi];
        auto present = block_presence(fn, b);
        std::vector<std::pair<int, Presence>> temps(present.begin(), present.end());
        // temps live through the whole block pairwise overlap no matter the
        // schedule; detect obviously unsatisfiable pressure here
        int need_alloc = 0;
        std::set<RegId> pre_alloc;
        for (auto& [t, p] : temps) {
            if (!(p.live_in && p.live_out)) continue;
            const auto& pre = fn.temps[static_cast<size_t>(t)].precolor;
            if (pre) {
                if (isa.is_allocatable(*pre) && !pre_alloc.insert(*pre).second)
                    throw ModelError(fn.name + ": precolored temps clash on r" + std::to_string(*pre) +
                                     " in block " + std::to_string(b.id));
            } else {
                ++need_alloc;
            }
        }
        if (need_alloc + static_cast<int>(pre_alloc.size()) > static_cast<int>(isa.allocatable.size()))
            throw ModelError(fn.name + ": more simultaneously live temps than registers in block " +
                             std::to_string(b.id));
        for (size_t i = 0; i < temps.size(); ++i) {
            for (size_t j = i + 1; j < temps.size(); ++j) {
                int ta = temps[i].first, tb = temps[j].first;
                const auto& pa = fn.temps[static_cast<size_t>(ta)].precolor;
                const auto& pb = fn.temps[static_cast<size_t>(tb)].precolor;
                if (pa && pb && *pa != *pb) continue; // never equal
                if (pa && !isa.is_allocatable(*pa) && !pb) continue;
                if (pb && !isa.is_allocatable(*pb) && !pa) continue;
                InterferencePair pair;
                pair.class_a = m.class_var(ta);
                pair.class_b = m.class_var(tb);
                pair.a = make_interval(temps[i].second, m.last_branch[bi]);
                pair.b = make_interval(temps[j].second, m.last_branch[bi]);
                m.interference.push_back(std::move(pair));
            }
        }
    }

    for (size_t bi = 0; bi < fn.blocks.size(); ++bi)
        m.objective.terms.push_back({m.cycle_var(m.last_branch[bi]), m.block_freq[bi]});
    for (long long f : m.block_freq) m.objective.constant += f;

    return m;
}

long long evaluate_cost(const Function& fn, const SolutionAssignment& sol) {
    if (sol.cycles.size() != fn.instructions.size())
        throw std::invalid_argument("evaluate_cost: incomplete solution");
    std::vector<int> ms = block_makespans(fn, sol);
    long long total = 0;
    for (size_t bi = 0; bi < fn.blocks.size(); ++bi)
        total += static_cast<long long>(fn.blocks[bi].freq) * (ms[bi] + 1);
    return total;
}

long long gap_bound(long long o, double p) {
    if (p < 0) throw std::invalid_argument("gap must be >= 0");
    long long micro = std::llround(p * 1e6);
    return o + (micro * o) / 1000000;
}

void post_gap_constraint(ConstraintModel& model, long long o, double p) {
    long long bound = gap_bound(o, p);
    if (!model.objective.bound || bound < *model.objective.bound) model.objective.bound = bound;
}

namespace {

struct CheckedInterval {
    int start;
    int end;
};

// Same interval rules as the model, evaluated on a concrete schedule.
std::optional<CheckedInterval> concrete_interval(const Presence& p, const SolutionAssignment& sol,
                                                 int makespan) {
    if (!p.any()) return std::nullopt;
    CheckedInterval iv{0, 0};
    if (p.live_in) {
        iv.start = 0;
    } else {
        const std::vector<int>& starts = p.defs.empty() ? p.uses : p.defs;
        iv.start = sol.cycles[static_cast<size_t>(starts[0])];
        for (int id : starts) iv.start = std::min(iv.start, sol.cycles[static_cast<size_t>(id)]);
    }
    if (p.live_out) {
        iv.end = makespan;
    } else {
        iv.end = iv.start;
        for (int id : p.uses) iv.end = std::max(iv.end, sol.cycles[static_cast<size_t>(id)]);
        for (int id : p.defs) iv.end = std::max(iv.end, sol.cycles[static_cast<size_t>(id)]);
    }
    return iv;
}

} // namespace

std::vector<std::string> validate_solution(const Function& fn, const IsaTable& isa,
                                           const SolutionAssignment& sol,
                                           std::optional<long long> cost_bound) {
    std::vector<std::string> bad;
    auto complain = [&bad](std::string msg) { bad.push_back(std::move(msg)); };

    if (sol.cycles.size() != fn.instructions.size() || sol.impls.size() != fn.instructions.size() ||
        sol.regs.size() != static_cast<size_t>(fn.num_operands)) {
        complain("assignment vectors have wrong sizes");
        return bad;
    }

    for (const Instruction& ins : fn.instructions) {
        int impl = sol.impls[static_cast<size_t>(ins.id)];
        if (impl < 0 || impl >= static_cast<int>(ins.opcode_alts.size()))
            complain("instruction " + std::to_string(ins.id) + ": implementation out of range");
        if (sol.cycles[static_cast<size_t>(ins.id)] < 0)
            complain("instruction " + std::to_string(ins.id) + ": negative cycle");
    }
    if (!bad.empty()) return bad;

    // registers: precolors respected, equal within a temp, allocatable otherwise
    std::vector<int> temp_reg(fn.temps.size(), -1);
    for (const Instruction& ins : fn.instructions) {
        for (size_t o = 0; o < ins.operands.size(); ++o) {
            const Operand& op = ins.operands[o];
            int gidx = fn.operand_base[static_cast<size_t>(ins.id)] + static_cast<int>(o);
            int r = sol.regs[static_cast<size_t>(gidx)];
            const TempInfo& t = fn.temps[static_cast<size_t>(op.temp)];
            if (t.precolor && r != *t.precolor)
                complain("operand of temp " + t.name + " ignores precolor");
            if (!t.precolor && !isa.is_allocatable(r))
                complain("temp " + t.name + " assigned non-allocatable r" + std::to_string(r));
            if (temp_reg[static_cast<size_t>(op.temp)] < 0)
                temp_reg[static_cast<size_t>(op.temp)] = r;
            else if (temp_reg[static_cast<size_t>(op.temp)] != r)
                complain("temp " + t.name + " split across registers");
        }
    }

    // schedule: distinct cycles per block, branch tail last and ordered
    std::vector<int> ms = block_makespans(fn, sol);
    for (size_t bi = 0; bi < fn.blocks.size(); ++bi) {
        const Block& b = fn.blocks[bi];
        std::set<int> seen;
        int prev_branch_cycle = -1;
        int max_nonbranch = -1;
        int min_branch = 1 << 30;
        for (int id : b.instructions) {
            int c = sol.cycles[static_cast<size_t>(id)];
            if (!seen.insert(c).second)
                complain("block " + std::to_string(b.id) + ": two instructions at cycle " + std::to_string(c));
            const Instruction& ins = fn.instructions[static_cast<size_t>(id)];
            if (ins.is_branch(isa)) {
                if (c <= prev_branch_cycle)
                    complain("block " + std::to_string(b.id) + ": branch order violated");
                prev_branch_cycle = c;
                min_branch = std::min(min_branch, c);
            } else {
                max_nonbranch = std::max(max_nonbranch, c);
            }
        }
        if (max_nonbranch >= min_branch)
            complain("block " + std::to_string(b.id) + ": instruction scheduled after a branch");
        if (prev_branch_cycle != ms[bi])
            complain("block " + std::to_string(b.id) + ": final branch is not the makespan");
    }

    // dependencies
    for (const Dependency& d : fn.dependencies) {
        int ci = sol.cycles[static_cast<size_t>(d.producer)];
        int cj = sol.cycles[static_cast<size_t>(d.consumer)];
        int lat = 1;
        if (d.kind != DepKind::Anti) {
            const Instruction& p = fn.instructions[static_cast<size_t>(d.producer)];
            lat = isa.op(p.opcode_alts[static_cast<size_t>(sol.impls[static_cast<size_t>(d.producer)])]).latency;
        }
        if (cj < ci + lat)
            complain("dependency " + std::to_string(d.producer) + "->" + std::to_string(d.consumer) +
                     " violated");
    }

    // interference, recomputed from the schedule
    for (size_t bi = 0; bi < fn.blocks.size(); ++bi) {
        auto present = block_presence(fn, fn.blocks[bi]);
        std::vector<std::pair<int, CheckedInterval>> ivs;
        for (auto& [t, p] : present)
            if (auto iv = concrete_interval(p, sol, ms[bi]))
                ivs.push_back({t, *iv});
        for (size_t i = 0; i < ivs.size(); ++i) {
            for (size_t j = i + 1; j < ivs.size(); ++j) {
                int ra = temp_reg[static_cast<size_t>(ivs[i].first)];
                int rb = temp_reg[static_cast<size_t>(ivs[j].first)];
                if (ra < 0 || rb < 0 || ra != rb) continue;
                const CheckedInterval &x = ivs[i].second, &y = ivs[j].second;
                if (x.start <= y.end && y.start <= x.end)
                    complain("temps " + fn.temps[static_cast<size_t>(ivs[i].first)].name + " and " +
                             fn.temps[static_cast<size_t>(ivs[j].first)].name + " share r" +
                             std::to_string(ra) + " while both live in block " +
                             std::to_string(fn.blocks[bi].id));
            }
        }
    }

    long long cost = evaluate_cost(fn, sol);
    if (cost != sol.cost) complain("stored cost does not match the schedule");
    if (cost_bound && cost > *cost_bound)
        complain("cost " + std::to_string(cost) + " exceeds bound " + std::to_string(*cost_bound));

    return bad;
}

} // namespace mosaic
