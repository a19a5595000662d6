#include "mosaic/diversify.hpp"

#include "mosaic/listing.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>
#include <thread>

namespace mosaic {

Algorithm algorithm_from(const std::string& name) {
    if (name == "lns") return Algorithm::LNS;
    if (name == "dlns") return Algorithm::DLNS;
    if (name == "rs") return Algorithm::RS;
    if (name == "maxdiv") return Algorithm::MaxDiv;
    throw std::invalid_argument("unknown algorithm " + name);
}

std::string algorithm_name(Algorithm a) {
    switch (a) {
    case Algorithm::LNS: return "lns";
    case Algorithm::DLNS: return "dlns";
    case Algorithm::RS: return "rs";
    case Algorithm::MaxDiv: return "maxdiv";
    }
    return "?";
}

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::optional<Clock::time_point> deadline_from(Clock::time_point t0, double limit) {
    if (!std::isfinite(limit)) return std::nullopt;
    return t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(limit));
}

bool past(const std::optional<Clock::time_point>& deadline) {
    return deadline && Clock::now() >= *deadline;
}

struct Prepared {
    ConstraintModel model;
    VariantSet vs;
    Clock::time_point t0;
    std::optional<Clock::time_point> deadline;
};

// optimize, then post the gap bound; the clock starts after optimization
Prepared prepare(const Function& fn, const IsaTable& isa, const DiversifyConfig& cfg) {
    if (cfg.k < 1) throw std::invalid_argument("k must be >= 1");
    if (cfg.p < 0) throw std::invalid_argument("gap must be >= 0");
    Prepared pr{build_model(fn, isa), {}, {}, {}};
    SearchParams opt_params = cfg.search;
    opt_params.branching = Branching::Original;
    OptimizationResult opt = optimize(pr.model, opt_params);
    post_gap_constraint(pr.model, opt.o, cfg.p);
    pr.vs.solutions.push_back(opt.y_opt);
    pr.vs.timestamps.push_back(0.0);
    pr.vs.cost_opt = opt.o;
    pr.vs.bound = *pr.model.objective.bound;
    pr.vs.proven_optimal = opt.proven;
    pr.vs.stop_reason = "k";
    pr.t0 = Clock::now();
    pr.deadline = deadline_from(pr.t0, cfg.search.time_limit);
    return pr;
}

// Distance constraints with no terms cannot reach h >= 1; detect the
// degenerate projection (a GD spec on a branch-free local problem).
bool distance_degenerate(const Function& fn, const IsaTable& isa, const DistanceSpec& spec) {
    if (spec.kind != DistanceKind::GD) return false;
    for (const Instruction& ins : fn.instructions)
        if (ins.is_indirect_branch(isa)) return false;
    return true;
}

// Shared LNS loop: destroy/repair around the last solution, posting a
// distance constraint for every accepted one. Appends to vs.
void lns_loop(const Function& fn, const IsaTable& isa, const DiversifyConfig& cfg,
              ConstraintModel& model, VariantSet& vs, Clock::time_point t0,
              std::optional<Clock::time_point> deadline) {
    bool degenerate = distance_degenerate(fn, isa, cfg.spec);
    std::set<SolutionAssignment> seen(vs.solutions.begin(), vs.solutions.end());
    if (!degenerate)
        for (const SolutionAssignment& s : vs.solutions)
            post_distance_constraint(model, s, cfg.spec, fn, isa);

    SearchParams params = cfg.search;
    params.branching = Branching::Random;
    params.time_limit = std::numeric_limits<double>::infinity();
    Searcher searcher(model, params);
    searcher.set_deadline(deadline);

    SolutionAssignment y = vs.solutions.back();
    long long attempts = 0;
    bool full_relax_probe = false;
    while (static_cast<int>(vs.solutions.size()) < cfg.k) {
        if (past(deadline)) {
            vs.stop_reason = "time";
            break;
        }
        if (cfg.max_attempts >= 0 && attempts >= cfg.max_attempts) {
            vs.stop_reason = "attempts";
            break;
        }
        ++attempts;
        double rate = full_relax_probe ? 1.0 : cfg.search.relax_rate;
        PartialAssignment pa = relax(y, model, rate, searcher.rng());
        SolveResult out = searcher.solve_once(&pa);
        if (out.status == SolveStatus::Solution) {
            full_relax_probe = false;
            y = *out.solution;
            if (degenerate) {
                if (!seen.insert(y).second) continue; // duplicate under dedup fallback
            }
            vs.solutions.push_back(y);
            vs.timestamps.push_back(seconds_since(t0));
            if (!degenerate) post_distance_constraint(model, y, cfg.spec, fn, isa);
        } else if (out.status == SolveStatus::Exhausted) {
            if (rate >= 1.0) {
                vs.stop_reason = "exhausted";
                break;
            }
            // the relaxed neighborhood is dry; probe the full space next
            full_relax_probe = true;
        } else if (out.status == SolveStatus::Timeout) {
            vs.stop_reason = "time";
            break;
        }
        // FailLimit: restart with a fresh destroy roll
    }
}

} // namespace

VariantSet run_lns(const Function& fn, const IsaTable& isa, const DiversifyConfig& cfg) {
    Prepared pr = prepare(fn, isa, cfg);
    lns_loop(fn, isa, cfg, pr.model, pr.vs, pr.t0, pr.deadline);
    pr.vs.wall_time = seconds_since(pr.t0);
    return pr.vs;
}

VariantSet run_rs(const Function& fn, const IsaTable& isa, const DiversifyConfig& cfg) {
    Prepared pr = prepare(fn, isa, cfg);
    SearchParams params = cfg.search;
    params.branching = Branching::Random;
    params.time_limit = std::numeric_limits<double>::infinity();
    Searcher searcher(pr.model, params);
    searcher.set_deadline(pr.deadline);

    std::set<SolutionAssignment> seen(pr.vs.solutions.begin(), pr.vs.solutions.end());
    long long attempts = 0;
    while (static_cast<int>(pr.vs.solutions.size()) < cfg.k) {
        if (past(pr.deadline)) {
            pr.vs.stop_reason = "time";
            break;
        }
        if (cfg.max_attempts >= 0 && attempts >= cfg.max_attempts) {
            pr.vs.stop_reason = "attempts";
            break;
        }
        ++attempts;
        SolveResult out = searcher.solve_once();
        if (out.status == SolveStatus::Solution) {
            if (seen.insert(*out.solution).second) {
                pr.vs.solutions.push_back(*out.solution);
                pr.vs.timestamps.push_back(seconds_since(pr.t0));
            }
        } else if (out.status == SolveStatus::Exhausted) {
            pr.vs.stop_reason = "exhausted";
            break;
        } else if (out.status == SolveStatus::Timeout) {
            pr.vs.stop_reason = "time";
            break;
        }
    }
    pr.vs.wall_time = seconds_since(pr.t0);
    return pr.vs;
}

VariantSet run_maxdiv(const Function& fn, const IsaTable& isa, const DiversifyConfig& cfg) {
    Prepared pr = prepare(fn, isa, cfg);
    long long attempts = 0;
    while (static_cast<int>(pr.vs.solutions.size()) < cfg.k) {
        if (past(pr.deadline)) {
            pr.vs.stop_reason = "time";
            break;
        }
        if (cfg.max_attempts >= 0 && attempts >= cfg.max_attempts) {
            pr.vs.stop_reason = "attempts";
            break;
        }
        ++attempts;

        // maximize min distance to S by iterative strengthening; every
        // iterate is a complete (proving) search
        ConstraintModel working = pr.model;
        for (const SolutionAssignment& s : pr.vs.solutions) {
            DistanceSpec spec = cfg.spec;
            post_distance_constraint(working, s, spec, fn, isa);
        }
        SearchParams params = cfg.search;
        params.branching = Branching::Original;
        params.fail_limit = std::numeric_limits<long long>::max();
        params.seed = Rng::mix(cfg.search.seed, 7700 + attempts);
        params.time_limit = std::numeric_limits<double>::infinity();
        Searcher searcher(working, params);
        searcher.set_deadline(pr.deadline);

        std::optional<SolutionAssignment> best;
        bool proven = false;
        while (true) {
            SolveResult out = searcher.solve_next();
            if (out.status == SolveStatus::Solution) {
                best = out.solution;
                long long min_d = std::numeric_limits<long long>::max();
                for (const SolutionAssignment& s : pr.vs.solutions)
                    min_d = std::min(min_d, constraint_distance(s, *best, cfg.spec, fn, isa));
                DistanceSpec stronger = cfg.spec;
                stronger.h = min_d + 1;
                for (const SolutionAssignment& s : pr.vs.solutions)
                    post_distance_constraint(working, s, stronger, fn, isa);
                searcher.refresh_root();
            } else if (out.status == SolveStatus::Exhausted) {
                proven = true;
                break;
            } else { // timeout
                break;
            }
        }
        if (!proven) {
            pr.vs.stop_reason = "time";
            break; // only proven maximizers enter S
        }
        if (!best) {
            pr.vs.stop_reason = "exhausted"; // nothing at distance >= h remains
            break;
        }
        pr.vs.solutions.push_back(*best);
        pr.vs.timestamps.push_back(seconds_since(pr.t0));
    }
    pr.vs.wall_time = seconds_since(pr.t0);
    return pr.vs;
}

// ---------------------------------------------------------------------------
// DLNS
// ---------------------------------------------------------------------------

namespace {

struct BlockSubproblem {
    Function sub;
    std::vector<int> inst_map; // sub instruction id -> original id
    std::vector<int> temp_map; // sub temp id -> original temp id
};

// One block as a standalone function. Cross-block temps become precolored
// with their global register; block-level liveness is carried over.
BlockSubproblem make_block_subproblem(const Function& fn, const IsaTable& isa, size_t bi,
                                      const std::vector<int>& global_regs) {
    const Block& b = fn.blocks[bi];
    BlockSubproblem out;
    out.sub.name = fn.name + ".b" + std::to_string(b.id);

    std::map<int, int> temp_to_sub;
    auto sub_temp = [&](int orig) {
        auto it = temp_to_sub.find(orig);
        if (it != temp_to_sub.end()) return it->second;
        const TempInfo& t = fn.temps[static_cast<size_t>(orig)];
        TempInfo nt;
        nt.id = static_cast<int>(out.sub.temps.size());
        nt.name = t.name;
        nt.precolor = t.precolor;
        if (!nt.precolor && global_regs[static_cast<size_t>(orig)] >= 0)
            nt.precolor = global_regs[static_cast<size_t>(orig)];
        out.sub.temps.push_back(nt);
        out.temp_map.push_back(orig);
        temp_to_sub.emplace(orig, nt.id);
        return nt.id;
    };

    Block nb;
    nb.id = b.id;
    nb.freq = b.freq;
    for (int id : b.instructions) {
        const Instruction& ins = fn.instructions[static_cast<size_t>(id)];
        Instruction ni = ins;
        ni.id = static_cast<int>(out.sub.instructions.size());
        for (Operand& op : ni.operands) op.temp = sub_temp(op.temp);
        // local scheduling ignores targets; keep labels resolvable
        for (int& l : ni.labels) l = b.id;
        nb.instructions.push_back(ni.id);
        out.sub.instructions.push_back(std::move(ni));
        out.inst_map.push_back(id);
    }
    out.sub.blocks.push_back(std::move(nb));

    std::map<int, int> orig_to_sub_inst;
    for (size_t i = 0; i < out.inst_map.size(); ++i)
        orig_to_sub_inst[out.inst_map[i]] = static_cast<int>(i);
    for (const Dependency& d : fn.dependencies)
        if (d.kind == DepKind::Explicit && orig_to_sub_inst.count(d.producer) &&
            orig_to_sub_inst.count(d.consumer))
            out.sub.dependencies.push_back(
                {orig_to_sub_inst[d.producer], orig_to_sub_inst[d.consumer], -1, DepKind::Explicit});

    analyze(out.sub, isa);

    // restore the block-level liveness of the original function
    Block& sb = out.sub.blocks[0];
    sb.live_in.clear();
    sb.live_out.clear();
    for (int t : b.live_in)
        if (temp_to_sub.count(t)) sb.live_in.insert(temp_to_sub[t]);
    for (int t : b.live_out)
        if (temp_to_sub.count(t)) sb.live_out.insert(temp_to_sub[t]);
    return out;
}

// Longest dependency path with minimum latencies; floor for any schedule.
int block_makespan_lower_bound(const Function& fn, const IsaTable& isa, size_t bi) {
    const Block& b = fn.blocks[bi];
    std::map<int, int> dist; // instruction -> earliest cycle
    for (int id : b.instructions) dist[id] = 0;
    // relax in program order; dependencies never point backwards in one block
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Dependency& d : fn.dependencies) {
            if (!dist.count(d.producer) || !dist.count(d.consumer)) continue;
            int lat = d.kind == DepKind::Anti
                          ? 1
                          : fn.instructions[static_cast<size_t>(d.producer)].min_latency(isa);
            if (dist[d.consumer] < dist[d.producer] + lat) {
                dist[d.consumer] = dist[d.producer] + lat;
                changed = true;
            }
        }
    }
    int cp = 0;
    for (auto& [id, c] : dist) cp = std::max(cp, c);
    return std::max(cp, static_cast<int>(b.instructions.size()) - 1);
}

struct GlobalProblem {
    std::vector<int> vars;                     // temp ids to assign (global, unprecolored)
    std::vector<std::vector<int>> conflicts;   // per temp id, conflicting temp ids
    std::vector<std::set<RegId>> forbidden;    // per temp id, registers never usable
};

GlobalProblem make_global_problem(const Function& fn, const IsaTable& isa) {
    GlobalProblem gp;
    size_t nt = fn.temps.size();
    gp.conflicts.resize(nt);
    gp.forbidden.resize(nt);
    for (const TempInfo& t : fn.temps)
        if (t.global && !t.precolor) gp.vars.push_back(t.id);

    // block-level overlap approximation: temps sharing a block conflict
    std::set<int> globals(gp.vars.begin(), gp.vars.end());
    for (const Block& b : fn.blocks) {
        std::set<int> present(b.live_in.begin(), b.live_in.end());
        present.insert(b.live_out.begin(), b.live_out.end());
        for (int id : b.instructions)
            for (const Operand& op : fn.instructions[static_cast<size_t>(id)].operands)
                present.insert(op.temp);
        for (int t1 : present) {
            if (!globals.count(t1)) continue;
            for (int t2 : present) {
                if (t1 == t2) continue;
                const TempInfo& o = fn.temps[static_cast<size_t>(t2)];
                if (o.precolor) {
                    if (isa.is_allocatable(*o.precolor))
                        gp.forbidden[static_cast<size_t>(t1)].insert(*o.precolor);
                } else if (o.global) {
                    gp.conflicts[static_cast<size_t>(t1)].push_back(t2);
                }
            }
        }
    }
    for (auto& c : gp.conflicts) {
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
    }
    return gp;
}

// Destroy part of the previous global register assignment and repair it
// with a randomized greedy coloring.
bool repair_global(const GlobalProblem& gp, const IsaTable& isa, std::vector<int>& regs,
                   double relax_rate, Rng& rng) {
    std::vector<int> destroyed;
    for (int t : gp.vars)
        if (rng.bernoulli(relax_rate)) destroyed.push_back(t);
    for (int round = 0; round < 50; ++round) {
        std::vector<int> order = destroyed;
        rng.shuffle(order);
        std::vector<int> trial = regs;
        for (int t : destroyed) trial[static_cast<size_t>(t)] = -1;
        bool ok = true;
        for (int t : order) {
            std::vector<RegId> options;
            for (RegId r : isa.allocatable) {
                if (gp.forbidden[static_cast<size_t>(t)].count(r)) continue;
                bool used = false;
                for (int o : gp.conflicts[static_cast<size_t>(t)])
                    if (trial[static_cast<size_t>(o)] == r) used = true;
                if (!used) options.push_back(r);
            }
            if (options.empty()) {
                ok = false;
                break;
            }
            trial[static_cast<size_t>(t)] = options[static_cast<size_t>(rng.pick_index(options.size()))];
        }
        if (ok) {
            regs = trial;
            return true;
        }
    }
    return false;
}

} // namespace

VariantSet run_dlns(const Function& fn, const IsaTable& isa, const DiversifyConfig& cfg) {
    Prepared pr = prepare(fn, isa, cfg);
    const SolutionAssignment& y_opt = pr.vs.solutions[0];
    size_t nb = fn.blocks.size();

    GlobalProblem gp = make_global_problem(fn, isa);
    // global register values indexed by temp id; -1 where not applicable
    std::vector<int> global_regs(fn.temps.size(), -1);
    for (int t : gp.vars) {
        // read the optimum's register for this temp from any operand
        for (size_t o = 0; o < pr.model.class_of_operand.size(); ++o)
            if (pr.model.class_of_operand[o] == t) {
                global_regs[static_cast<size_t>(t)] = y_opt.regs[o];
                break;
            }
    }

    std::vector<int> ms_lb(nb);
    for (size_t bi = 0; bi < nb; ++bi) ms_lb[bi] = block_makespan_lower_bound(fn, isa, bi);

    int combine_attempts = cfg.combine_attempts > 0
                               ? cfg.combine_attempts
                               : static_cast<int>(nb) * 10;
    int workers = cfg.workers > 0 ? cfg.workers
                                  : std::max(1, std::min<int>(static_cast<int>(nb),
                                                              static_cast<int>(
                                                                  std::thread::hardware_concurrency())));

    Rng master(Rng::mix(cfg.search.seed, 0xd1153));
    SolutionAssignment y = y_opt;
    long long iteration = 0;
    int stalled = 0;
    while (static_cast<int>(pr.vs.solutions.size()) < cfg.k) {
        if (past(pr.deadline)) {
            pr.vs.stop_reason = "time";
            break;
        }
        if (cfg.max_attempts >= 0 && iteration >= cfg.max_attempts) {
            pr.vs.stop_reason = "attempts";
            break;
        }
        if (stalled >= 20) {
            pr.vs.stop_reason = "stalled";
            break;
        }
        ++iteration;

        // (1) partial solve of the global problem
        repair_global(gp, isa, global_regs, cfg.global_relax_rate, master);

        // (2) local problems, independently and concurrently
        std::vector<BlockSubproblem> subs;
        subs.reserve(nb);
        for (size_t bi = 0; bi < nb; ++bi) subs.push_back(make_block_subproblem(fn, isa, bi, global_regs));

        std::vector<std::vector<SolutionAssignment>> locals(nb);
        std::vector<long long> local_budget(nb);
        for (size_t bi = 0; bi < nb; ++bi) {
            long long rest = 0;
            for (size_t bj = 0; bj < nb; ++bj)
                if (bj != bi) rest += static_cast<long long>(fn.blocks[bj].freq) * (ms_lb[bj] + 1);
            local_budget[bi] = pr.vs.bound - rest;
        }

        std::vector<std::thread> pool;
        std::atomic<size_t> next_block{0};
        auto worker = [&]() {
            while (true) {
                size_t bi = next_block.fetch_add(1);
                if (bi >= nb) return;
                const BlockSubproblem& sp = subs[bi];
                locals[bi].clear();
                try {
                    ConstraintModel lm = build_model(sp.sub, isa);
                    lm.objective.bound = local_budget[bi];
                    // seed: the last combined solution restricted to the
                    // block, re-based onto the fresh global assignment
                    SolutionAssignment seed;
                    for (size_t si = 0; si < sp.inst_map.size(); ++si) {
                        int orig = sp.inst_map[si];
                        seed.cycles.push_back(y.cycles[static_cast<size_t>(orig)]);
                        seed.impls.push_back(y.impls[static_cast<size_t>(orig)]);
                        const Instruction& oins = fn.instructions[static_cast<size_t>(orig)];
                        for (size_t o = 0; o < oins.operands.size(); ++o) {
                            int r = y.regs[static_cast<size_t>(fn.operand_base[static_cast<size_t>(orig)]) + o];
                            int gr = global_regs[static_cast<size_t>(oins.operands[o].temp)];
                            seed.regs.push_back(gr >= 0 ? gr : r);
                        }
                    }
                    seed.cost = evaluate_cost(sp.sub, seed);
                    DiversifyConfig lcfg = cfg;
                    lcfg.k = cfg.locals_per_block;
                    lcfg.search.seed =
                        Rng::mix(cfg.search.seed, iteration * 1009 + static_cast<long long>(bi));
                    lcfg.max_attempts = cfg.locals_per_block * 20;
                    bool seed_ok = seed.cost <= local_budget[bi] &&
                                   validate_solution(sp.sub, isa, seed, local_budget[bi]).empty();
                    if (!seed_ok) {
                        // the new global registers invalidate the old local
                        // part; find any solution of the local model instead
                        SearchParams sparams = lcfg.search;
                        sparams.branching = Branching::Random;
                        sparams.time_limit = std::numeric_limits<double>::infinity();
                        Searcher s(lm, sparams);
                        s.set_deadline(pr.deadline);
                        SolveResult out = s.solve_next();
                        if (out.status != SolveStatus::Solution) continue;
                        seed = *out.solution;
                    }
                    VariantSet lvs;
                    lvs.solutions.push_back(seed);
                    lvs.timestamps.push_back(0.0);
                    lvs.bound = local_budget[bi];
                    lns_loop(sp.sub, isa, lcfg, lm, lvs, pr.t0, pr.deadline);
                    locals[bi] = std::move(lvs.solutions);
                } catch (const ModelError&) {
                    // unsatisfiable local problem under this global assignment
                }
            }
        };
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();

        bool blocks_ok = true;
        for (size_t bi = 0; bi < nb; ++bi)
            if (locals[bi].empty()) blocks_ok = false;
        if (!blocks_ok) {
            ++stalled;
            continue;
        }

        // (3) combine random local picks into candidate solutions
        bool appended = false;
        for (int att = 0; att < combine_attempts &&
                          static_cast<int>(pr.vs.solutions.size()) < cfg.k && !past(pr.deadline);
             ++att) {
            SolutionAssignment cand;
            cand.cycles.assign(fn.instructions.size(), 0);
            cand.impls.assign(fn.instructions.size(), 0);
            cand.regs.assign(static_cast<size_t>(fn.num_operands), -1);
            for (size_t bi = 0; bi < nb; ++bi) {
                const auto& pick =
                    locals[bi][static_cast<size_t>(master.pick_index(locals[bi].size()))];
                const BlockSubproblem& sp = subs[bi];
                size_t reg_cursor = 0;
                for (size_t si = 0; si < sp.inst_map.size(); ++si) {
                    int orig = sp.inst_map[si];
                    cand.cycles[static_cast<size_t>(orig)] = pick.cycles[si];
                    cand.impls[static_cast<size_t>(orig)] = pick.impls[si];
                    size_t ops = fn.instructions[static_cast<size_t>(orig)].operands.size();
                    for (size_t o = 0; o < ops; ++o)
                        cand.regs[static_cast<size_t>(fn.operand_base[static_cast<size_t>(orig)]) + o] =
                            pick.regs[reg_cursor++];
                }
            }
            cand.cost = evaluate_cost(fn, cand);
            if (cand.cost > pr.vs.bound) continue;
            bool distinct = true;
            for (const SolutionAssignment& s : pr.vs.solutions)
                if (constraint_distance(s, cand, cfg.spec, fn, isa) < cfg.spec.h) {
                    distinct = false;
                    break;
                }
            if (!distinct) continue;
            if (!validate_solution(fn, isa, cand, pr.vs.bound).empty()) continue;
            pr.vs.solutions.push_back(cand);
            pr.vs.timestamps.push_back(seconds_since(pr.t0));
            y = cand;
            appended = true;
        }
        stalled = appended ? 0 : stalled + 1;
    }
    pr.vs.wall_time = seconds_since(pr.t0);
    return pr.vs;
}

VariantSet diversify(const Function& fn, const IsaTable& isa, const DiversifyConfig& cfg) {
    switch (cfg.algorithm) {
    case Algorithm::LNS: return run_lns(fn, isa, cfg);
    case Algorithm::DLNS: return run_dlns(fn, isa, cfg);
    case Algorithm::RS: return run_rs(fn, isa, cfg);
    case Algorithm::MaxDiv: return run_maxdiv(fn, isa, cfg);
    }
    throw std::logic_error("bad algorithm");
}

std::vector<std::string> check_variant_set(const VariantSet& vs, const Function& fn,
                                           const IsaTable& isa, const DistanceSpec& spec,
                                           bool dedup_only) {
    std::vector<std::string> bad;
    for (size_t i = 0; i < vs.solutions.size(); ++i) {
        auto v = validate_solution(fn, isa, vs.solutions[i], vs.bound);
        for (auto& msg : v) bad.push_back("variant " + std::to_string(i) + ": " + msg);
    }
    for (size_t i = 0; i < vs.solutions.size(); ++i) {
        for (size_t j = i + 1; j < vs.solutions.size(); ++j) {
            if (dedup_only) {
                if (vs.solutions[i] == vs.solutions[j])
                    bad.push_back("variants " + std::to_string(i) + "," + std::to_string(j) +
                                  " are identical");
            } else if (constraint_distance(vs.solutions[i], vs.solutions[j], spec, fn, isa) < spec.h) {
                bad.push_back("variants " + std::to_string(i) + "," + std::to_string(j) +
                              " closer than h");
            }
        }
    }
    return bad;
}

} // namespace mosaic
