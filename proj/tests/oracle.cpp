#include "oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace mosaic::oracle {

namespace {

struct Enumerator {
    const Function& fn;
    const IsaTable& isa;
    Options opt;
    bool minimize;

    std::vector<int> impls;  // per instruction: index into opcode_alts
    std::vector<int> cycles; // per instruction
    std::vector<int> temp_reg;
    std::vector<SolutionAssignment> found;
    long long best = LLONG_MAX;

    Enumerator(const Function& f, const IsaTable& t, Options o, bool min_mode)
        : fn(f), isa(t), opt(o), minimize(min_mode) {
        impls.assign(fn.instructions.size(), 0);
        cycles.assign(fn.instructions.size(), -1);
        temp_reg.assign(fn.temps.size(), -1);
    }

    int horizon(const Block& b) const {
        int h = static_cast<int>(b.instructions.size());
        for (int id : b.instructions) h += fn.instructions[static_cast<size_t>(id)].max_latency(isa);
        return h;
    }

    int chosen_latency(int inst) const {
        const Instruction& i = fn.instructions[static_cast<size_t>(inst)];
        return isa.op(i.opcode_alts[static_cast<size_t>(impls[static_cast<size_t>(inst)])]).latency;
    }

    bool deps_ok_so_far(int inst) const {
        // checks every dependency whose endpoints are both scheduled
        for (const Dependency& d : fn.dependencies) {
            if (d.consumer != inst && d.producer != inst) continue;
            int ci = cycles[static_cast<size_t>(d.producer)];
            int cj = cycles[static_cast<size_t>(d.consumer)];
            if (ci < 0 || cj < 0) continue;
            int lat = d.kind == DepKind::Anti ? 1 : chosen_latency(d.producer);
            if (cj < ci + lat) return false;
        }
        return true;
    }

    bool branch_rule_ok(const Block& b) const {
        int prev_branch = -1;
        int max_nonbranch = -1;
        int min_branch = INT_MAX;
        for (int id : b.instructions) {
            int c = cycles[static_cast<size_t>(id)];
            if (fn.instructions[static_cast<size_t>(id)].is_branch(isa)) {
                if (c <= prev_branch) return false;
                prev_branch = c;
                min_branch = std::min(min_branch, c);
            } else {
                max_nonbranch = std::max(max_nonbranch, c);
            }
        }
        return max_nonbranch < min_branch;
    }

    long long block_cost(size_t bi) const {
        int ms = 0;
        for (int id : fn.blocks[bi].instructions)
            ms = std::max(ms, cycles[static_cast<size_t>(id)]);
        return static_cast<long long>(fn.blocks[bi].freq) * (ms + 1);
    }

    long long bound() const { return minimize ? std::min(best - 1, opt.cost_bound) : opt.cost_bound; }

    // live interval of a temp in a block under the current schedule
    bool interval_in_block(int temp, size_t bi, int& start, int& end) const {
        const Block& b = fn.blocks[bi];
        bool live_in = b.live_in.count(temp) > 0;
        bool live_out = b.live_out.count(temp) > 0;
        std::vector<int> defs, uses;
        for (int id : b.instructions) {
            const Instruction& ins = fn.instructions[static_cast<size_t>(id)];
            for (const Operand& op : ins.operands) {
                if (op.temp != temp) continue;
                (op.role == Role::Def ? defs : uses).push_back(cycles[static_cast<size_t>(id)]);
            }
        }
        if (!live_in && !live_out && defs.empty() && uses.empty()) return false;
        int ms = 0;
        for (int id : b.instructions) ms = std::max(ms, cycles[static_cast<size_t>(id)]);
        if (live_in)
            start = 0;
        else if (!defs.empty())
            start = *std::min_element(defs.begin(), defs.end());
        else
            start = *std::min_element(uses.begin(), uses.end());
        if (live_out) {
            end = ms;
        } else {
            end = start;
            for (int c : uses) end = std::max(end, c);
            for (int c : defs) end = std::max(end, c);
        }
        return true;
    }

    bool temps_conflict(int t1, int t2) const {
        for (size_t bi = 0; bi < fn.blocks.size(); ++bi) {
            int s1, e1, s2, e2;
            if (!interval_in_block(t1, bi, s1, e1)) continue;
            if (!interval_in_block(t2, bi, s2, e2)) continue;
            if (s1 <= e2 && s2 <= e1) return true;
        }
        return false;
    }

    void assign_registers(size_t ti, long long cost) {
        if (found.size() >= opt.max_solutions) return;
        if (ti == fn.temps.size()) {
            SolutionAssignment sol;
            sol.cycles = cycles;
            sol.impls = impls;
            sol.regs.resize(static_cast<size_t>(fn.num_operands));
            for (const Instruction& ins : fn.instructions)
                for (size_t o = 0; o < ins.operands.size(); ++o)
                    sol.regs[static_cast<size_t>(fn.operand_base[static_cast<size_t>(ins.id)]) + o] =
                        temp_reg[static_cast<size_t>(ins.operands[o].temp)];
            sol.cost = cost;
            if (minimize) {
                best = std::min(best, cost);
                if (found.empty() || cost < found[0].cost)
                    found.assign(1, sol);
            } else {
                found.push_back(std::move(sol));
            }
            return;
        }
        const TempInfo& t = fn.temps[ti];
        std::vector<RegId> options;
        if (t.precolor)
            options = {*t.precolor};
        else
            options.assign(isa.allocatable.begin(), isa.allocatable.end());
        for (RegId r : options) {
            bool ok = true;
            for (size_t tj = 0; tj < ti && ok; ++tj)
                if (temp_reg[tj] == r && temps_conflict(static_cast<int>(ti), static_cast<int>(tj)))
                    ok = false;
            if (!ok) continue;
            temp_reg[ti] = r;
            assign_registers(ti + 1, cost);
            temp_reg[ti] = -1;
            if (minimize && !found.empty() && found[0].cost <= cost) return; // registers done
            if (found.size() >= opt.max_solutions) return;
        }
    }

    void schedule_block(size_t bi, size_t pos, long long cost_prior) {
        if (found.size() >= opt.max_solutions) return;
        const Block& b = fn.blocks[bi];
        if (pos == b.instructions.size()) {
            if (!branch_rule_ok(b)) return;
            long long cost = cost_prior + block_cost(bi);
            if (cost > bound()) return;
            next_block(bi + 1, cost);
            return;
        }
        int inst = b.instructions[pos];
        const Instruction& ins = fn.instructions[static_cast<size_t>(inst)];
        int hor = horizon(b);
        for (size_t alt = 0; alt < ins.opcode_alts.size(); ++alt) {
            impls[static_cast<size_t>(inst)] = static_cast<int>(alt);
            for (int c = 0; c <= hor; ++c) {
                bool taken = false;
                for (size_t q = 0; q < pos; ++q)
                    if (cycles[static_cast<size_t>(b.instructions[q])] == c) taken = true;
                if (taken) continue;
                cycles[static_cast<size_t>(inst)] = c;
                if (deps_ok_so_far(inst)) {
                    // partial cost prune: this block's makespan so far
                    int ms = 0;
                    for (size_t q = 0; q <= pos; ++q)
                        ms = std::max(ms, cycles[static_cast<size_t>(b.instructions[q])]);
                    long long lower =
                        cost_prior + static_cast<long long>(b.freq) * (ms + 1);
                    if (lower <= bound()) schedule_block(bi, pos + 1, cost_prior);
                }
                cycles[static_cast<size_t>(inst)] = -1;
                if (found.size() >= opt.max_solutions) return;
            }
        }
        impls[static_cast<size_t>(inst)] = 0;
    }

    void next_block(size_t bi, long long cost_so_far) {
        if (bi == fn.blocks.size()) {
            assign_registers(0, cost_so_far);
            return;
        }
        // remaining blocks cost at least freq * |instructions|
        long long floor_rest = 0;
        for (size_t bj = bi; bj < fn.blocks.size(); ++bj)
            floor_rest += static_cast<long long>(fn.blocks[bj].freq) *
                          static_cast<long long>(fn.blocks[bj].instructions.size());
        if (cost_so_far + floor_rest > bound()) return;
        schedule_block(bi, 0, cost_so_far);
    }
};

} // namespace

std::vector<SolutionAssignment> enumerate_solutions(const Function& fn, const IsaTable& isa,
                                                    const Options& opt) {
    Enumerator e(fn, isa, opt, false);
    e.next_block(0, 0);
    std::sort(e.found.begin(), e.found.end());
    e.found.erase(std::unique(e.found.begin(), e.found.end()), e.found.end());
    return e.found;
}

long long min_cost(const Function& fn, const IsaTable& isa) {
    Enumerator e(fn, isa, Options{}, true);
    e.next_block(0, 0);
    if (e.found.empty()) return LLONG_MAX;
    return e.best;
}

long long naive_hd(const SolutionAssignment& a, const SolutionAssignment& b) {
    long long d = 0;
    for (size_t i = 0; i < a.cycles.size(); ++i) d += a.cycles[i] != b.cycles[i] ? 1 : 0;
    return d;
}

namespace {

std::vector<int> naive_channel(const SolutionAssignment& s, const Function& fn) {
    std::vector<int> tokens;
    for (const Block& b : fn.blocks) {
        int ms = 0;
        for (int id : b.instructions) ms = std::max(ms, s.cycles[static_cast<size_t>(id)]);
        for (int c = 0; c <= ms; ++c) {
            int who = -1;
            for (int id : b.instructions)
                if (s.cycles[static_cast<size_t>(id)] == c) who = id;
            tokens.push_back(who);
        }
    }
    return tokens;
}

} // namespace

long long naive_ld(const SolutionAssignment& a, const SolutionAssignment& b, const Function& fn) {
    std::vector<int> x = naive_channel(a, fn), y = naive_channel(b, fn);
    // full-matrix dynamic program
    std::vector<std::vector<long long>> dp(x.size() + 1, std::vector<long long>(y.size() + 1, 0));
    for (size_t i = 0; i <= x.size(); ++i) dp[i][0] = static_cast<long long>(i);
    for (size_t j = 0; j <= y.size(); ++j) dp[0][j] = static_cast<long long>(j);
    for (size_t i = 1; i <= x.size(); ++i)
        for (size_t j = 1; j <= y.size(); ++j)
            dp[i][j] = x[i - 1] == y[j - 1]
                           ? dp[i - 1][j - 1]
                           : 1 + std::min({dp[i - 1][j - 1], dp[i - 1][j], dp[i][j - 1]});
    return dp[x.size()][y.size()];
}

long long naive_gd(const SolutionAssignment& a, const SolutionAssignment& b, const Function& fn,
                   const IsaTable& isa, int n_r, int n_c) {
    long long total = 0;
    for (const Instruction& br : fn.instructions) {
        if (!br.is_indirect_branch(isa)) continue;
        for (const Instruction& ins : fn.instructions) {
            int dc = a.cycles[static_cast<size_t>(br.id)] - a.cycles[static_cast<size_t>(ins.id)];
            if (dc >= 0 && dc <= n_c &&
                a.cycles[static_cast<size_t>(ins.id)] != b.cycles[static_cast<size_t>(ins.id)])
                ++total;
            if (dc >= 0 && dc <= n_r) {
                for (size_t o = 0; o < ins.operands.size(); ++o) {
                    size_t g = static_cast<size_t>(fn.operand_base[static_cast<size_t>(ins.id)]) + o;
                    if (a.regs[g] != b.regs[g]) ++total;
                }
            }
        }
    }
    return total;
}

double naive_pairwise_hd(const std::vector<SolutionAssignment>& sols) {
    long long sum = 0;
    long long pairs = 0;
    for (size_t i = 0; i < sols.size(); ++i)
        for (size_t j = i + 1; j < sols.size(); ++j) {
            sum += naive_hd(sols[i], sols[j]);
            ++pairs;
        }
    return static_cast<double>(sum) / static_cast<double>(pairs);
}

Function load_bench(const std::string& id) {
    BenchmarkSuite suite = bundled_suite();
    return load_benchmark(suite, id, mini_mips());
}

} // namespace mosaic::oracle
