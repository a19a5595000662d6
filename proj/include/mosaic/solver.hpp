#pragma once

#include "mosaic/model.hpp"
#include "mosaic/rng.hpp"

#include <array>
#include <chrono>
#include <limits>
#include <memory>
#include <optional>

namespace mosaic {

enum class Branching { Original, Random };

struct SearchParams {
    Branching branching = Branching::Original;
    long long fail_limit = 1000; // failures per restart
    double relax_rate = 0.6;
    uint64_t seed = 1;
    double time_limit = std::numeric_limits<double>::infinity(); // seconds
};

enum class SolveStatus { Solution, Exhausted, FailLimit, Timeout };

struct SolveResult {
    SolveStatus status;
    std::optional<SolutionAssignment> solution;
};

struct OptimizationResult {
    SolutionAssignment y_opt;
    long long o = 0;
    bool proven = false;
};

// Values per model variable; fixed[v] selects which are pinned.
struct PartialAssignment {
    std::vector<int> values;
    std::vector<char> fixed;
};

// Finite domain over the integers 0..255 as a flat bitset.
class Dom {
public:
    void init_range(int lo, int hi);
    void init_list(const std::vector<int>& values);
    bool contains(int v) const { return v >= 0 && v <= 255 && (w_[v >> 6] >> (v & 63)) & 1; }
    int lb() const { return lb_; }
    int ub() const { return ub_; }
    int size() const { return size_; }
    bool empty() const { return size_ == 0; }
    bool assigned() const { return size_ == 1; }
    int value() const { return lb_; }
    bool remove(int v);
    bool remove_below(int v); // keep values >= v
    bool remove_above(int v); // keep values <= v
    bool fix(int v);
    int nth(int k) const; // k-th smallest value
    template <typename F>
    void for_each(F&& f) const {
        for (int v = lb_; v <= ub_; ++v)
            if (contains(v)) f(v);
    }

private:
    void recache();
    std::array<uint64_t, 4> w_{};
    int16_t lb_ = 0;
    int16_t ub_ = -1;
    int16_t size_ = 0;
};

using Store = std::vector<Dom>;
using Clock = std::chrono::steady_clock;

// A search owns one model reference and a deterministic generator. The
// model may gain distance constraints between calls; refresh_root() makes
// them effective.
class Searcher {
public:
    Searcher(const ConstraintModel& model, SearchParams params);
    ~Searcher();
    Searcher(Searcher&&) noexcept;

    void refresh_root();
    bool root_consistent() const;

    // a single attempt bounded by the failure limit
    SolveResult solve_once(const PartialAssignment* fixed = nullptr);
    // restart-based search: restarts on the failure limit until a solution,
    // exhaustion, or the time limit
    SolveResult solve_next(const PartialAssignment* fixed = nullptr);
    // complete branch-and-bound minimization of the objective
    OptimizationResult optimize();

    void set_deadline(std::optional<Clock::time_point> deadline);
    Rng& rng();
    long long failures() const;
    // root-propagated domains, mainly for tests
    std::vector<std::vector<int>> root_domains() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Destroy step: every decision variable is independently unassigned with
// probability rate, the rest pinned to the solution's values.
PartialAssignment relax(const SolutionAssignment& sol, const ConstraintModel& model, double rate,
                        Rng& rng);

OptimizationResult optimize(const ConstraintModel& model, const SearchParams& params);
SolveResult solve_next(const ConstraintModel& model, const SearchParams& params);

} // namespace mosaic
