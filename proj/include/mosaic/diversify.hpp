#pragma once

#include "mosaic/distances.hpp"
#include "mosaic/model.hpp"
#include "mosaic/solver.hpp"

#include <string>
#include <vector>

namespace mosaic {

enum class Algorithm { LNS, DLNS, RS, MaxDiv };

Algorithm algorithm_from(const std::string& name);
std::string algorithm_name(Algorithm a);

struct DiversifyConfig {
    Algorithm algorithm = Algorithm::LNS;
    int k = 200;     // maximum number of variants, including the optimum
    double p = 0.10; // optimality gap
    DistanceSpec spec;
    SearchParams search;
    // decomposition settings
    double global_relax_rate = 0.5;
    int locals_per_block = 10;
    int combine_attempts = 0; // 0: |blocks| * 10 per global iteration
    int workers = 0;          // 0: one per block up to hardware concurrency
    // deterministic budget: repair attempts (LNS), solve calls (RS),
    // maximizations (MaxDiv), global iterations (DLNS); -1 = unbounded
    long long max_attempts = -1;
};

struct VariantSet {
    std::vector<SolutionAssignment> solutions; // solutions[0] is the optimum
    std::vector<double> timestamps;            // seconds since diversification start
    long long cost_opt = 0;
    long long bound = 0; // posted gap bound
    bool proven_optimal = true;
    std::string stop_reason; // "k" | "exhausted" | "time" | "attempts" | "stalled"
    double wall_time = 0;    // diversification loop only
};

VariantSet run_lns(const Function& fn, const IsaTable& isa, const DiversifyConfig& cfg);
VariantSet run_dlns(const Function& fn, const IsaTable& isa, const DiversifyConfig& cfg);
VariantSet run_rs(const Function& fn, const IsaTable& isa, const DiversifyConfig& cfg);
VariantSet run_maxdiv(const Function& fn, const IsaTable& isa, const DiversifyConfig& cfg);

// dispatch on cfg.algorithm
VariantSet diversify(const Function& fn, const IsaTable& isa, const DiversifyConfig& cfg);

// Checks the two VariantSet invariants with the independent validator:
// every solution within the gap bound, and (unless dedup_only) every pair
// at configured distance >= h, one-sided for GD. Returns violations.
std::vector<std::string> check_variant_set(const VariantSet& vs, const Function& fn,
                                           const IsaTable& isa, const DistanceSpec& spec,
                                           bool dedup_only = false);

} // namespace mosaic
