#include "mosaic/bench.hpp"
#include "mosaic/report.hpp"

#include "oracle.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mosaic;
namespace fs = std::filesystem;

namespace {
const IsaTable& isa() { return mini_mips(); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

DiversifyConfig quick_cfg(Algorithm algo, int k, uint64_t seed) {
    DiversifyConfig cfg;
    cfg.algorithm = algo;
    cfg.k = k;
    cfg.p = 0.10;
    cfg.search.seed = seed;
    cfg.search.fail_limit = 200;
    cfg.max_attempts = 300;
    return cfg;
}

fs::path temp_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("mosaic_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("run directories round-trip through the manifest") {
    Function fn = oracle::load_bench("fact");
    DiversifyConfig cfg = quick_cfg(Algorithm::LNS, 4, 11);
    VariantSet vs = run_lns(fn, isa(), cfg);
    RunOptions opt;
    opt.stable_timing = true;
    fs::path dir = temp_dir("roundtrip");
    write_run_dir(dir.string(), "fact", fn, isa(), vs, cfg, opt);

    LoadedRun run = load_run_dir(dir.string(), isa());
    CHECK(run.report.id == "fact");
    CHECK(run.report.algo == "lns");
    CHECK(run.report.num == static_cast<int>(vs.solutions.size()));
    REQUIRE(run.solutions.size() == vs.solutions.size());
    for (size_t i = 0; i < vs.solutions.size(); ++i) CHECK(run.solutions[i] == vs.solutions[i]);
    CHECK(functions_equal(run.fn, fn));

    // every emitted variant file re-parses and matches its manifest row
    for (size_t i = 0; i < vs.solutions.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "fact.v%03zu.s", i);
        AssemblyListing from_file = parse_listing(slurp(dir / name));
        AssemblyListing from_sol = linearize(run.fn, run.solutions[i], isa(), 0);
        CHECK(print_listing(from_file) == print_listing(from_sol));
        CHECK(validate_solution(run.fn, isa(), run.solutions[i]).empty());
    }
}

TEST_CASE("missing run directories are reported") {
    CHECK_THROWS(load_run_dir("/nonexistent/run", isa()));
}

TEST_CASE("distance tables group columns per algorithm") {
    Function fn = oracle::load_bench("gdpair");
    fs::path dir = temp_dir("tables");
    std::vector<LoadedRun> runs;
    for (Algorithm algo : {Algorithm::LNS, Algorithm::RS}) {
        DiversifyConfig cfg = quick_cfg(algo, 4, 5);
        VariantSet vs = diversify(fn, isa(), cfg);
        RunOptions opt;
        opt.stable_timing = true;
        std::string sub = (dir / algorithm_name(algo)).string();
        write_run_dir(sub, "gdpair", fn, isa(), vs, cfg, opt);
        runs.push_back(load_run_dir(sub, isa()));
    }
    std::string table = distance_table_csv(runs);
    CHECK(table.find("id,lns_d,lns_t,lns_num,rs_d,rs_t,rs_num") == 0);
    CHECK(table.find("\ngdpair,") != std::string::npos);

    std::string surv = survival_table_csv(runs);
    CHECK(surv.rfind("id,=0,<=10,<=40,<=100,num", 0) == 0);
    // one row per run plus the header
    CHECK(std::count(surv.begin(), surv.end(), '\n') == 3);
}

TEST_CASE("combined programs are deterministic and label their search space") {
    Function f1 = oracle::load_bench("fact");
    Function f2 = oracle::load_bench("gdpair");
    Function f3 = oracle::load_bench("pair2");
    std::vector<VariantSet> sets;
    for (const Function* f : {&f1, &f2, &f3})
        sets.push_back(run_lns(*f, isa(), quick_cfg(Algorithm::LNS, 4, 2)));
    std::vector<const Function*> fns = {&f1, &f2, &f3};
    std::vector<const VariantSet*> ptrs = {&sets[0], &sets[1], &sets[2]};

    SUBCASE("equal seeds produce identical bytes") {
        CombineResult a = combine_program(fns, ptrs, true, 31, isa(), 0);
        CombineResult b = combine_program(fns, ptrs, true, 31, isa(), 0);
        CHECK(print_listing(a.program) == print_listing(b.program));
    }
    SUBCASE("search space multiplies variant counts, times f! under shuffling") {
        CombineResult nfs = combine_program(fns, ptrs, false, 1, isa(), 0);
        CombineResult fsr = combine_program(fns, ptrs, true, 1, isa(), 0);
        double base = static_cast<double>(sets[0].solutions.size()) *
                      static_cast<double>(sets[1].solutions.size()) *
                      static_cast<double>(sets[2].solutions.size());
        CHECK(nfs.search_space == doctest::Approx(base));
        CHECK(fsr.search_space == doctest::Approx(base * 6.0));
    }
    SUBCASE("identity order equals the no-shuffle output") {
        std::vector<int> picks = {0, 1, 1};
        std::vector<int> order = {0, 1, 2};
        for (size_t i = 0; i < sets.size(); ++i)
            REQUIRE(static_cast<int>(sets[i].solutions.size()) > picks[i]);
        CombineResult by_order = combine_program_ordered(fns, ptrs, picks, order, isa(), 0x100);
        CombineResult manual = combine_program_ordered(fns, ptrs, picks, {0, 1, 2}, isa(), 0x100);
        CHECK(print_listing(by_order.program) == print_listing(manual.program));
        // addresses are contiguous across function boundaries
        for (size_t i = 0; i < by_order.program.lines.size(); ++i)
            CHECK(by_order.program.lines[i].address == 0x100 + 4 * i);
    }
    SUBCASE("single function: shuffling changes nothing") {
        std::vector<const Function*> one_fn = {&f1};
        std::vector<const VariantSet*> one_set = {&sets[0]};
        CombineResult nfs = combine_program(one_fn, one_set, false, 9, isa(), 0);
        CombineResult fsr = combine_program(one_fn, one_set, true, 9, isa(), 0);
        CHECK(print_listing(nfs.program) == print_listing(fsr.program));
    }
}

TEST_CASE("the relax-rate study reports signed improvement ratios") {
    Function fn = oracle::load_bench("fact");
    DiversifyConfig cfg = quick_cfg(Algorithm::LNS, 8, 3);
    auto rows = relax_rate_study(fn, isa(), {0.3, 0.6}, cfg);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        REQUIRE(row.comparable);
        double hi = std::max(row.d_lns, row.d_rs), lo = std::min(row.d_lns, row.d_rs);
        if (hi == lo) {
            CHECK(row.p_delta == doctest::Approx(1.0));
            CHECK(row.delta_favors == "equal");
        } else {
            CHECK(row.p_delta == doctest::Approx(hi / lo));
            CHECK(row.delta_favors == (row.d_lns > row.d_rs ? "lns" : "rs"));
        }
        CHECK(row.p_t >= 1.0);
    }
    std::string csv = relax_table_csv(rows);
    CHECK(csv.rfind("rate,comparable,", 0) == 0);
}

TEST_CASE("reports have stable bytes when timing is suppressed") {
    Function fn = oracle::load_bench("gdpair");
    DiversifyConfig cfg = quick_cfg(Algorithm::LNS, 5, 77);
    RunOptions opt;
    opt.stable_timing = true;
    fs::path d1 = temp_dir("det1"), d2 = temp_dir("det2");
    write_run_dir(d1.string(), "gdpair", fn, isa(), run_lns(fn, isa(), cfg), cfg, opt);
    write_run_dir(d2.string(), "gdpair", fn, isa(), run_lns(fn, isa(), cfg), cfg, opt);
    for (const char* name : {"function.ir", "manifest.jsonl", "report.csv"})
        CHECK(slurp(d1 / name) == slurp(d2 / name));
}
