#pragma once

#include "mosaic/diversify.hpp"
#include "mosaic/gadgets.hpp"
#include "mosaic/listing.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mosaic {

struct RunOptions {
    uint32_t base_addr = 0;
    int window = 8;
    bool eval_gadgets = true;
    bool stable_timing = false; // write t as 0.000 for byte-comparable reports
};

// One (benchmark x config) result row.
struct RunReport {
    std::string id;
    std::string algo;
    std::string dist;
    double gap = 0;
    long long h = 1;
    int k = 0;
    uint64_t seed = 0;
    int num = 0;
    double d = 0; // mean pairwise distance
    double t = 0; // diversification seconds
    SurvivalHistogram hist;
    std::string stop_reason;
};

RunReport make_report(const std::string& id, const Function& fn, const IsaTable& isa,
                      const VariantSet& vs, const DiversifyConfig& cfg, const RunOptions& opt);

// Writes function.ir, one .s file per variant, manifest.jsonl and report.csv.
void write_run_dir(const std::string& dir, const std::string& id, const Function& fn,
                   const IsaTable& isa, const VariantSet& vs, const DiversifyConfig& cfg,
                   const RunOptions& opt);

std::string report_csv_header();
std::string report_csv_row(const RunReport& r);

struct LoadedRun {
    RunReport report;
    Function fn;
    std::vector<SolutionAssignment> solutions;
};

LoadedRun load_run_dir(const std::string& dir, const IsaTable& isa);

// Table-shaped outputs over several run directories.
std::string distance_table_csv(const std::vector<LoadedRun>& runs);
std::string survival_table_csv(const std::vector<LoadedRun>& runs);

// ---------------------------------------------------------------------------

struct CombineResult {
    AssemblyListing program;
    std::vector<int> order; // function order used (indices into input)
    std::vector<int> picks; // chosen variant per function (input order)
    double search_space = 0;
};

// Picks one variant per function (seeded), NFS keeps the input order and FS
// applies a seeded permutation, then assigns contiguous addresses.
CombineResult combine_program(const std::vector<const Function*>& fns,
                              const std::vector<const VariantSet*>& sets, bool function_shuffle,
                              uint64_t seed, const IsaTable& isa, uint32_t base);

CombineResult combine_program_ordered(const std::vector<const Function*>& fns,
                                      const std::vector<const VariantSet*>& sets,
                                      const std::vector<int>& picks, const std::vector<int>& order,
                                      const IsaTable& isa, uint32_t base);

// ---------------------------------------------------------------------------

struct RelaxRateRow {
    double rate = 0;
    bool comparable = false;
    double d_lns = 0, d_rs = 0;
    double t_lns = 0, t_rs = 0;
    double p_delta = 0; // larger-over-smaller ratio of d
    double p_t = 0;     // larger-over-smaller ratio of t
    std::string delta_favors; // "lns" | "rs" | "equal"
    std::string t_favors;
};

// Runs LNS at each rate against an RS baseline with the same budget.
std::vector<RelaxRateRow> relax_rate_study(const Function& fn, const IsaTable& isa,
                                           const std::vector<double>& rates,
                                           const DiversifyConfig& base_cfg);

std::string relax_table_csv(const std::vector<RelaxRateRow>& rows);

} // namespace mosaic
