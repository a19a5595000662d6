#include "mosaic/solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace mosaic {

void Dom::init_range(int lo, int hi) {
    w_ = {};
    for (int v = lo; v <= hi; ++v) w_[v >> 6] |= 1ULL << (v & 63);
    recache();
}

void Dom::init_list(const std::vector<int>& values) {
    w_ = {};
    for (int v : values) {
        assert(v >= 0 && v <= 255);
        w_[v >> 6] |= 1ULL << (v & 63);
    }
    recache();
}

void Dom::recache() {
    size_ = 0;
    lb_ = 256;
    ub_ = -1;
    for (int word = 0; word < 4; ++word) {
        uint64_t x = w_[static_cast<size_t>(word)];
        if (!x) continue;
        size_ = static_cast<int16_t>(size_ + __builtin_popcountll(x));
        int lo = word * 64 + __builtin_ctzll(x);
        int hi = word * 64 + 63 - __builtin_clzll(x);
        lb_ = std::min<int16_t>(lb_, static_cast<int16_t>(lo));
        ub_ = std::max<int16_t>(ub_, static_cast<int16_t>(hi));
    }
    if (size_ == 0) {
        lb_ = 0;
        ub_ = -1;
    }
}

bool Dom::remove(int v) {
    if (!contains(v)) return false;
    w_[v >> 6] &= ~(1ULL << (v & 63));
    recache();
    return true;
}

bool Dom::remove_below(int v) {
    if (v <= lb_) return false;
    bool changed = false;
    for (int word = 0; word < 4; ++word) {
        int base = word * 64;
        if (base + 63 < v) {
            changed |= w_[static_cast<size_t>(word)] != 0;
            w_[static_cast<size_t>(word)] = 0;
        } else if (base < v) {
            uint64_t mask = ~0ULL << (v - base);
            uint64_t nw = w_[static_cast<size_t>(word)] & mask;
            changed |= nw != w_[static_cast<size_t>(word)];
            w_[static_cast<size_t>(word)] = nw;
        }
    }
    if (changed) recache();
    return changed;
}

bool Dom::remove_above(int v) {
    if (v >= ub_) return false;
    bool changed = false;
    for (int word = 0; word < 4; ++word) {
        int base = word * 64;
        if (base > v) {
            changed |= w_[static_cast<size_t>(word)] != 0;
            w_[static_cast<size_t>(word)] = 0;
        } else if (base + 63 > v) {
            uint64_t mask = (v - base == 63) ? ~0ULL : ((1ULL << (v - base + 1)) - 1);
            uint64_t nw = w_[static_cast<size_t>(word)] & mask;
            changed |= nw != w_[static_cast<size_t>(word)];
            w_[static_cast<size_t>(word)] = nw;
        }
    }
    if (changed) recache();
    return changed;
}

bool Dom::fix(int v) {
    if (!contains(v)) {
        w_ = {};
        recache();
        return true; // emptied: caller observes failure
    }
    if (assigned()) return false;
    w_ = {};
    w_[v >> 6] = 1ULL << (v & 63);
    recache();
    return true;
}

int Dom::nth(int k) const {
    for (int v = lb_; v <= ub_; ++v)
        if (contains(v) && k-- == 0) return v;
    return -1;
}

namespace {

enum class PKind : uint8_t { Prec, AllDiff, Interf, Obj, DiffSum };

struct PropRef {
    PKind kind;
    int idx;
};

struct IntervalBounds {
    int slb, sub; // bounds of the interval start
    int elb, eub; // bounds of the interval end
};

} // namespace

struct Searcher::Impl {
    const ConstraintModel& m;
    SearchParams params;
    Rng rnd;
    Store root;
    bool root_ok = false;

    std::vector<PropRef> props;
    std::vector<std::vector<int>> subs; // var -> propagator indices
    std::vector<char> queued;
    std::vector<int> queue;

    long long dyn_bound = std::numeric_limits<long long>::max();
    long long fail_count = 0;
    std::optional<Clock::time_point> deadline;
    size_t model_sig = 0; // tracks growth of posted constraints

    Impl(const ConstraintModel& model, SearchParams p) : m(model), params(p), rnd(p.seed) {
        rebuild();
    }

    size_t signature() const { return m.diff_sums.size() * 1315423911u + m.ld_checks.size(); }

    void rebuild() {
        props.clear();
        subs.assign(static_cast<size_t>(m.num_vars()), {});
        auto sub = [this](int var, int prop) { subs[static_cast<size_t>(var)].push_back(prop); };
        for (size_t i = 0; i < m.precedences.size(); ++i) {
            int id = static_cast<int>(props.size());
            props.push_back({PKind::Prec, static_cast<int>(i)});
            const Precedence& pc = m.precedences[i];
            sub(m.cycle_var(pc.before), id);
            sub(m.cycle_var(pc.after), id);
            if (!pc.unit) sub(m.impl_var(pc.before), id);
        }
        for (size_t i = 0; i < m.alldiff_groups.size(); ++i) {
            int id = static_cast<int>(props.size());
            props.push_back({PKind::AllDiff, static_cast<int>(i)});
            for (int v : m.alldiff_groups[i]) sub(v, id);
        }
        for (size_t i = 0; i < m.interference.size(); ++i) {
            int id = static_cast<int>(props.size());
            props.push_back({PKind::Interf, static_cast<int>(i)});
            const InterferencePair& p = m.interference[i];
            sub(p.class_a, id);
            sub(p.class_b, id);
            for (int v : p.a.start_vars) sub(v, id);
            for (int v : p.a.end_vars) sub(v, id);
            for (int v : p.b.start_vars) sub(v, id);
            for (int v : p.b.end_vars) sub(v, id);
        }
        {
            int id = static_cast<int>(props.size());
            props.push_back({PKind::Obj, 0});
            for (auto [v, c] : m.objective.terms) sub(v, id);
        }
        for (size_t i = 0; i < m.diff_sums.size(); ++i) {
            int id = static_cast<int>(props.size());
            props.push_back({PKind::DiffSum, static_cast<int>(i)});
            for (const auto& t : m.diff_sums[i].terms) sub(t.var, id);
        }
        queued.assign(props.size(), 0);
        queue.clear();
        model_sig = signature();

        root.resize(static_cast<size_t>(m.num_vars()));
        for (int v = 0; v < m.num_vars(); ++v)
            root[static_cast<size_t>(v)].init_list(m.domains[static_cast<size_t>(v)]);
        enqueue_all();
        root_ok = propagate(root);
    }

    void enqueue_all() {
        queue.clear();
        std::fill(queued.begin(), queued.end(), 0);
        for (size_t i = 0; i < props.size(); ++i) {
            queue.push_back(static_cast<int>(i));
            queued[i] = 1;
        }
    }

    void enqueue(int prop) {
        if (!queued[static_cast<size_t>(prop)]) {
            queued[static_cast<size_t>(prop)] = 1;
            queue.push_back(prop);
        }
    }

    void touched(int var) {
        for (int p : subs[static_cast<size_t>(var)]) enqueue(p);
    }

    int min_latency(const Store& s, int inst) const {
        const Dom& d = s[static_cast<size_t>(m.impl_var(inst))];
        int best = 1 << 20;
        d.for_each([&](int a) { best = std::min(best, m.alt_latencies[static_cast<size_t>(inst)][static_cast<size_t>(a)]); });
        return best;
    }

    bool prop_prec(Store& s, const Precedence& pc) {
        Dom& cb = s[static_cast<size_t>(m.cycle_var(pc.before))];
        Dom& ca = s[static_cast<size_t>(m.cycle_var(pc.after))];
        int lat = pc.unit ? 1 : min_latency(s, pc.before);
        if (ca.remove_below(cb.lb() + lat)) {
            if (ca.empty()) return false;
            touched(m.cycle_var(pc.after));
        }
        if (cb.remove_above(ca.ub() - lat)) {
            if (cb.empty()) return false;
            touched(m.cycle_var(pc.before));
        }
        if (!pc.unit) {
            int max_allowed = ca.ub() - cb.lb();
            Dom& mi = s[static_cast<size_t>(m.impl_var(pc.before))];
            bool ch = false;
            std::vector<int> drop;
            mi.for_each([&](int a) {
                if (m.alt_latencies[static_cast<size_t>(pc.before)][static_cast<size_t>(a)] > max_allowed)
                    drop.push_back(a);
            });
            for (int a : drop) ch |= mi.remove(a);
            if (ch) {
                if (mi.empty()) return false;
                touched(m.impl_var(pc.before));
            }
        }
        return true;
    }

    bool prop_alldiff(Store& s, const std::vector<int>& group) {
        for (int v : group) {
            const Dom& d = s[static_cast<size_t>(v)];
            if (!d.assigned()) continue;
            int val = d.value();
            for (int u : group) {
                if (u == v) continue;
                Dom& du = s[static_cast<size_t>(u)];
                if (du.remove(val)) {
                    if (du.empty()) return false;
                    touched(u);
                }
            }
        }
        return true;
    }

    IntervalBounds interval_bounds(const Store& s, const LiveInterval& iv) const {
        IntervalBounds b{0, 0, 0, 0};
        if (iv.from_block_start) {
            b.slb = b.sub = 0;
        } else {
            b.slb = 1 << 20;
            b.sub = 1 << 20;
            for (int v : iv.start_vars) {
                const Dom& d = s[static_cast<size_t>(v)];
                b.slb = std::min(b.slb, d.lb());
                b.sub = std::min(b.sub, d.ub());
            }
        }
        b.elb = -1;
        b.eub = -1;
        for (int v : iv.end_vars) {
            const Dom& d = s[static_cast<size_t>(v)];
            b.elb = std::max(b.elb, d.lb());
            b.eub = std::max(b.eub, d.ub());
        }
        return b;
    }

    bool prop_interf(Store& s, const InterferencePair& p) {
        IntervalBounds a = interval_bounds(s, p.a);
        IntervalBounds b = interval_bounds(s, p.b);
        if (!(a.slb <= b.eub && b.slb <= a.eub)) return true; // disjoint for sure
        bool certain_overlap = a.sub <= b.elb && b.sub <= a.elb;
        if (!certain_overlap) return true; // undecided; the leaf check settles it
        Dom& ra = s[static_cast<size_t>(p.class_a)];
        Dom& rb = s[static_cast<size_t>(p.class_b)];
        if (ra.assigned()) {
            if (rb.remove(ra.value())) {
                if (rb.empty()) return false;
                touched(p.class_b);
            }
        }
        if (rb.assigned()) {
            if (ra.remove(rb.value())) {
                if (ra.empty()) return false;
                touched(p.class_a);
            }
        }
        return true;
    }

    bool prop_obj(Store& s) {
        long long bound = dyn_bound;
        if (m.objective.bound) bound = std::min(bound, *m.objective.bound);
        if (bound == std::numeric_limits<long long>::max()) return true;
        long long lb = m.objective.constant;
        for (auto [v, c] : m.objective.terms) lb += c * s[static_cast<size_t>(v)].lb();
        if (lb > bound) return false;
        for (auto [v, c] : m.objective.terms) {
            Dom& d = s[static_cast<size_t>(v)];
            long long rest = lb - c * d.lb();
            long long cap = (bound - rest) / c;
            if (d.remove_above(static_cast<int>(std::min<long long>(cap, 255)))) {
                if (d.empty()) return false;
                touched(v);
            }
        }
        return true;
    }

    bool prop_diffsum(Store& s, const DiffSumCon& ds) {
        long long sure = 0, potential = 0;
        for (const auto& t : ds.terms) {
            const Dom& d = s[static_cast<size_t>(t.var)];
            if (!d.contains(t.value))
                sure += t.weight;
            else if (!d.assigned())
                potential += t.weight;
        }
        long long max_sum = sure + potential;
        if (max_sum < ds.min_sum) return false;
        if (sure >= ds.min_sum) return true; // entailed
        for (const auto& t : ds.terms) {
            Dom& d = s[static_cast<size_t>(t.var)];
            if (!d.contains(t.value) || d.assigned()) continue;
            if (max_sum - t.weight < ds.min_sum) {
                d.remove(t.value);
                if (d.empty()) return false;
                touched(t.var);
            }
        }
        return true;
    }

    bool propagate(Store& s) {
        while (!queue.empty()) {
            int pid = queue.back();
            queue.pop_back();
            queued[static_cast<size_t>(pid)] = 0;
            const PropRef& pr = props[static_cast<size_t>(pid)];
            bool ok = true;
            switch (pr.kind) {
            case PKind::Prec: ok = prop_prec(s, m.precedences[static_cast<size_t>(pr.idx)]); break;
            case PKind::AllDiff: ok = prop_alldiff(s, m.alldiff_groups[static_cast<size_t>(pr.idx)]); break;
            case PKind::Interf: ok = prop_interf(s, m.interference[static_cast<size_t>(pr.idx)]); break;
            case PKind::Obj: ok = prop_obj(s); break;
            case PKind::DiffSum: ok = prop_diffsum(s, m.diff_sums[static_cast<size_t>(pr.idx)]); break;
            }
            if (!ok) {
                queue.clear();
                std::fill(queued.begin(), queued.end(), 0);
                return false;
            }
        }
        return true;
    }

    // ---- leaf checks that are cheaper as full-assignment tests ----

    int concrete_start(const Store& s, const LiveInterval& iv) const {
        if (iv.from_block_start) return 0;
        int v = 1 << 20;
        for (int var : iv.start_vars) v = std::min(v, s[static_cast<size_t>(var)].value());
        return v;
    }
    int concrete_end(const Store& s, const LiveInterval& iv) const {
        int v = -1;
        for (int var : iv.end_vars) v = std::max(v, s[static_cast<size_t>(var)].value());
        return v;
    }

    std::vector<int> channel_of(const Store& s) const {
        std::vector<int> tokens;
        for (size_t bi = 0; bi < m.block_insts.size(); ++bi) {
            int ms = 0;
            for (int id : m.block_insts[bi])
                ms = std::max(ms, s[static_cast<size_t>(m.cycle_var(id))].value());
            std::vector<int> slot(static_cast<size_t>(ms) + 1, -1);
            for (int id : m.block_insts[bi])
                slot[static_cast<size_t>(s[static_cast<size_t>(m.cycle_var(id))].value())] = id;
            tokens.insert(tokens.end(), slot.begin(), slot.end());
        }
        return tokens;
    }

    static long long edit_distance(const std::vector<int>& a, const std::vector<int>& b) {
        std::vector<long long> row(b.size() + 1);
        for (size_t j = 0; j <= b.size(); ++j) row[j] = static_cast<long long>(j);
        for (size_t i = 1; i <= a.size(); ++i) {
            long long corner = row[0];
            row[0] = static_cast<long long>(i);
            for (size_t j = 1; j <= b.size(); ++j) {
                long long up = row[j];
                row[j] = (a[i - 1] == b[j - 1]) ? corner
                                                : std::min({corner, up, row[j - 1]}) + 1;
                corner = up;
            }
        }
        return row[b.size()];
    }

    bool leaf_ok(const Store& s) const {
        for (const InterferencePair& p : m.interference) {
            if (s[static_cast<size_t>(p.class_a)].value() != s[static_cast<size_t>(p.class_b)].value())
                continue;
            int sa = concrete_start(s, p.a), ea = concrete_end(s, p.a);
            int sb = concrete_start(s, p.b), eb = concrete_end(s, p.b);
            if (sa <= eb && sb <= ea) return false;
        }
        if (!m.ld_checks.empty()) {
            std::vector<int> chan = channel_of(s);
            for (const LdCheckCon& c : m.ld_checks)
                if (edit_distance(chan, c.incumbent_channel) < c.h) return false;
        }
        return true;
    }

    SolutionAssignment extract(const Store& s) const {
        SolutionAssignment sol;
        sol.cycles.resize(static_cast<size_t>(m.num_insts));
        sol.impls.resize(static_cast<size_t>(m.num_insts));
        std::vector<int> class_vals(static_cast<size_t>(m.num_classes));
        for (int i = 0; i < m.num_insts; ++i) {
            sol.cycles[static_cast<size_t>(i)] = s[static_cast<size_t>(m.cycle_var(i))].value();
            sol.impls[static_cast<size_t>(i)] = s[static_cast<size_t>(m.impl_var(i))].value();
        }
        for (int c = 0; c < m.num_classes; ++c)
            class_vals[static_cast<size_t>(c)] = s[static_cast<size_t>(m.class_var(c))].value();
        sol.regs = m.expand_regs(class_vals);
        sol.cost = m.eval_objective(sol.cycles);
        return sol;
    }

    bool all_assigned(const Store& s) const {
        for (const Dom& d : s)
            if (!d.assigned()) return false;
        return true;
    }

    bool timed_out() const { return deadline && Clock::now() >= *deadline; }

    // variable/value selection; returns false when everything is assigned
    bool branch(const Store& s, int& var, int& val) {
        var = -1;
        if (params.branching == Branching::Original) {
            for (int v = 0; v < m.num_vars(); ++v) {
                if (!s[static_cast<size_t>(v)].assigned()) {
                    var = v;
                    break;
                }
            }
            if (var < 0) return false;
            const Dom& d = s[static_cast<size_t>(var)];
            if (var >= 2 * m.num_insts)
                val = d.nth(rnd.pick_index(static_cast<size_t>(d.size())));
            else
                val = d.lb();
            return true;
        }
        int unassigned = 0;
        for (int v = 0; v < m.num_vars(); ++v)
            if (!s[static_cast<size_t>(v)].assigned()) ++unassigned;
        if (unassigned == 0) return false;
        int pick = rnd.pick_index(static_cast<size_t>(unassigned));
        for (int v = 0; v < m.num_vars(); ++v) {
            if (s[static_cast<size_t>(v)].assigned()) continue;
            if (pick-- == 0) {
                var = v;
                break;
            }
        }
        const Dom& d = s[static_cast<size_t>(var)];
        val = d.nth(rnd.pick_index(static_cast<size_t>(d.size())));
        return true;
    }

    // Depth-first search from the root (plus optional pinned values).
    // In minimize mode every solution tightens dyn_bound and the search
    // continues; otherwise the first solution returns.
    struct DfsOutcome {
        SolveStatus status;
        std::optional<SolutionAssignment> solution;
    };

    DfsOutcome dfs(const PartialAssignment* fixed, bool minimize, long long fail_budget) {
        if (signature() != model_sig) rebuild();
        if (!root_ok) return {SolveStatus::Exhausted, std::nullopt};

        Store cur = root;
        enqueue_all();
        if (fixed) {
            for (int v = 0; v < m.num_vars(); ++v) {
                if (!fixed->fixed[static_cast<size_t>(v)]) continue;
                Dom& d = cur[static_cast<size_t>(v)];
                d.fix(fixed->values[static_cast<size_t>(v)]);
                if (d.empty()) return {SolveStatus::Exhausted, std::nullopt};
            }
        }

        struct Frame {
            Store store;
            int var; // the only domain differing from a propagated fixpoint
        };
        std::vector<Frame> stack;
        std::optional<SolutionAssignment> best;
        long long fails = 0;
        int steps = 0;
        bool need_propagate = true;
        int obj_prop = -1;
        for (size_t i = 0; i < props.size(); ++i)
            if (props[i].kind == PKind::Obj) obj_prop = static_cast<int>(i);

        auto pop_frame = [&]() {
            Frame f = std::move(stack.back());
            stack.pop_back();
            cur = std::move(f.store);
            touched(f.var);
            enqueue(obj_prop);
            need_propagate = true;
        };

        auto fail = [&]() -> std::optional<SolveStatus> {
            ++fails;
            ++fail_count;
            if (!minimize && fail_budget >= 0 && fails >= fail_budget) return SolveStatus::FailLimit;
            if (stack.empty()) return SolveStatus::Exhausted;
            pop_frame();
            return std::nullopt;
        };

        while (true) {
            if (++steps % 128 == 0 && timed_out())
                return {SolveStatus::Timeout, minimize ? best : std::nullopt};
            if (need_propagate) {
                need_propagate = false;
                if (!propagate(cur)) {
                    if (auto st = fail()) return {*st, minimize ? best : std::nullopt};
                    continue;
                }
            }
            int var, val;
            if (!branch(cur, var, val)) {
                // complete assignment
                if (!leaf_ok(cur)) {
                    if (auto st = fail()) return {*st, minimize ? best : std::nullopt};
                    continue;
                }
                SolutionAssignment sol = extract(cur);
                if (!minimize) return {SolveStatus::Solution, sol};
                best = sol;
                dyn_bound = sol.cost - 1;
                if (stack.empty()) return {SolveStatus::Exhausted, best};
                pop_frame();
                continue;
            }
            Store right = cur;
            right[static_cast<size_t>(var)].remove(val);
            if (!right[static_cast<size_t>(var)].empty())
                stack.push_back({std::move(right), var});
            cur[static_cast<size_t>(var)].fix(val);
            touched(var);
            need_propagate = true;
        }
    }
};

Searcher::Searcher(const ConstraintModel& model, SearchParams params)
    : impl_(std::make_unique<Impl>(model, params)) {
    if (params.fail_limit < 1) throw std::invalid_argument("fail_limit must be >= 1");
    if (params.relax_rate < 0 || params.relax_rate > 1)
        throw std::invalid_argument("relax_rate must be in [0,1]");
    if (std::isfinite(params.time_limit))
        impl_->deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                             std::chrono::duration<double>(params.time_limit));
}

Searcher::~Searcher() = default;
Searcher::Searcher(Searcher&&) noexcept = default;

void Searcher::refresh_root() { impl_->rebuild(); }

bool Searcher::root_consistent() const { return impl_->root_ok; }

SolveResult Searcher::solve_once(const PartialAssignment* fixed) {
    auto out = impl_->dfs(fixed, false, impl_->params.fail_limit);
    return {out.status, out.solution};
}

SolveResult Searcher::solve_next(const PartialAssignment* fixed) {
    while (true) {
        auto out = impl_->dfs(fixed, false, impl_->params.fail_limit);
        if (out.status == SolveStatus::FailLimit) {
            if (impl_->timed_out()) return {SolveStatus::Timeout, std::nullopt};
            continue; // restart from the root; random branching re-rolls
        }
        return {out.status, out.solution};
    }
}

OptimizationResult Searcher::optimize() {
    impl_->dyn_bound = std::numeric_limits<long long>::max();
    auto out = impl_->dfs(nullptr, true, -1);
    impl_->dyn_bound = std::numeric_limits<long long>::max();
    if (!out.solution) {
        if (out.status == SolveStatus::Timeout) throw ModelError("optimize: time limit before any solution");
        throw ModelError("optimize: model is infeasible");
    }
    OptimizationResult res;
    res.y_opt = *out.solution;
    res.o = res.y_opt.cost;
    res.proven = out.status == SolveStatus::Exhausted;
    return res;
}

void Searcher::set_deadline(std::optional<Clock::time_point> deadline) { impl_->deadline = deadline; }

Rng& Searcher::rng() { return impl_->rnd; }

long long Searcher::failures() const { return impl_->fail_count; }

std::vector<std::vector<int>> Searcher::root_domains() const {
    std::vector<std::vector<int>> out;
    for (const Dom& d : impl_->root) {
        std::vector<int> vals;
        d.for_each([&vals](int v) { vals.push_back(v); });
        out.push_back(std::move(vals));
    }
    return out;
}

PartialAssignment relax(const SolutionAssignment& sol, const ConstraintModel& model, double rate,
                        Rng& rng) {
    PartialAssignment pa;
    pa.values.assign(static_cast<size_t>(model.num_vars()), 0);
    pa.fixed.assign(static_cast<size_t>(model.num_vars()), 0);
    std::vector<int> class_vals(static_cast<size_t>(model.num_classes), -1);
    for (size_t o = 0; o < model.class_of_operand.size(); ++o)
        class_vals[static_cast<size_t>(model.class_of_operand[o])] = sol.regs[o];
    for (int v = 0; v < model.num_vars(); ++v) {
        int val;
        if (v < model.num_insts)
            val = sol.cycles[static_cast<size_t>(v)];
        else if (v < 2 * model.num_insts)
            val = sol.impls[static_cast<size_t>(v - model.num_insts)];
        else
            val = class_vals[static_cast<size_t>(v - 2 * model.num_insts)];
        bool destroy = rng.bernoulli(rate);
        if (!destroy) {
            pa.values[static_cast<size_t>(v)] = val;
            pa.fixed[static_cast<size_t>(v)] = 1;
        }
    }
    return pa;
}

OptimizationResult optimize(const ConstraintModel& model, const SearchParams& params) {
    Searcher s(model, params);
    return s.optimize();
}

SolveResult solve_next(const ConstraintModel& model, const SearchParams& params) {
    Searcher s(model, params);
    return s.solve_next();
}

} // namespace mosaic
