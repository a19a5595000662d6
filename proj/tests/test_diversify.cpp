#include "mosaic/diversify.hpp"

#include "oracle.hpp"

#include <doctest.h>

#include <set>

using namespace mosaic;

namespace {
const IsaTable& isa() { return mini_mips(); }

Function parse(const std::string& text) { return parse_function(text, isa()); }

DiversifyConfig config(Algorithm algo, int k, double p, uint64_t seed,
                       DistanceKind kind = DistanceKind::HD) {
    DiversifyConfig cfg;
    cfg.algorithm = algo;
    cfg.k = k;
    cfg.p = p;
    cfg.spec.kind = kind;
    cfg.spec.n_r = 0;
    cfg.spec.n_c = 8;
    cfg.spec.h = 1;
    cfg.search.seed = seed;
    cfg.search.fail_limit = 200;
    cfg.max_attempts = 500;
    return cfg;
}

} // namespace

TEST_CASE("LNS enumerates a three-solution space and reports exhaustion") {
    // one li plus the return: with bound 3 exactly three schedules exist,
    // all pairwise at hamming distance >= 1
    Function fn = parse("func three\nblock 0 freq=1\n  t1:$r1 <- li 5\n  jr $r13\n");
    oracle::Options opt;
    opt.cost_bound = 3; // = gap_bound(2, 0.5)
    auto all = oracle::enumerate_solutions(fn, isa(), opt);
    REQUIRE(all.size() == 3);

    VariantSet vs = run_lns(fn, isa(), config(Algorithm::LNS, 10, 0.5, 42));
    CHECK(vs.solutions.size() == 3);
    CHECK(vs.stop_reason == "exhausted");
    CHECK(check_variant_set(vs, fn, isa(), DistanceSpec{}).empty());
}

TEST_CASE("k of one returns only the optimum") {
    Function fn = oracle::load_bench("fact");
    VariantSet vs = run_lns(fn, isa(), config(Algorithm::LNS, 1, 0.1, 1));
    CHECK(vs.solutions.size() == 1);
    CHECK(vs.solutions[0].cost == 55);
}

TEST_CASE("LNS on the factorial yields five validated variants") {
    Function fn = oracle::load_bench("fact");
    DiversifyConfig cfg = config(Algorithm::LNS, 5, 0.10, 42);
    VariantSet vs = run_lns(fn, isa(), cfg);
    CHECK(vs.solutions.size() == 5);
    CHECK(check_variant_set(vs, fn, isa(), cfg.spec).empty());
}

TEST_CASE("a unique optimum under gap zero ends LNS with an exhaustion reason") {
    Function fn = parse("func one\nblock 0 freq=1\n  jr $r13\n");
    VariantSet vs = run_lns(fn, isa(), config(Algorithm::LNS, 10, 0.0, 3));
    CHECK(vs.solutions.size() == 1);
    CHECK(vs.stop_reason == "exhausted");
}

TEST_CASE("RS deduplicates and stays within the gap bound") {
    SUBCASE("unique optimum keeps size one") {
        Function fn = parse("func one\nblock 0 freq=1\n  jr $r13\n");
        DiversifyConfig cfg = config(Algorithm::RS, 10, 0.0, 5);
        cfg.max_attempts = 60;
        VariantSet vs = run_rs(fn, isa(), cfg);
        CHECK(vs.solutions.size() == 1);
    }
    SUBCASE("both solutions of a two-solution model are collected") {
        Function fn =
            parse("func two\nblock 0 freq=1\n  t1:$r1 <- li 1\n  t2:$r2 <- li 2\n  jr $r13\n");
        DiversifyConfig cfg = config(Algorithm::RS, 2, 0.0, 8);
        cfg.max_attempts = 200;
        VariantSet vs = run_rs(fn, isa(), cfg);
        std::set<std::vector<int>> schedules;
        for (const auto& s : vs.solutions) schedules.insert(s.cycles);
        CHECK(schedules.size() == 2);
        CHECK(check_variant_set(vs, fn, isa(), cfg.spec, true).empty());
    }
    SUBCASE("identical seeds give identical sets") {
        Function fn = oracle::load_bench("gdpair");
        DiversifyConfig cfg = config(Algorithm::RS, 8, 0.2, 21);
        VariantSet a = run_rs(fn, isa(), cfg);
        VariantSet b = run_rs(fn, isa(), cfg);
        CHECK(a.solutions == b.solutions);
    }
}

TEST_CASE("incremental max-diverse selection picks provable maximizers") {
    // cycles (li, jr): optimum (0,1); candidates (0,2) at HD 1 and (1,2) at HD 2
    Function fn = parse("func three\nblock 0 freq=1\n  t1:$r1 <- li 5\n  jr $r13\n");
    SUBCASE("second iterate maximizes distance to the optimum") {
        VariantSet vs = run_maxdiv(fn, isa(), config(Algorithm::MaxDiv, 2, 0.5, 7));
        REQUIRE(vs.solutions.size() == 2);
        CHECK(vs.solutions[0].cycles == std::vector<int>{0, 1});
        CHECK(vs.solutions[1].cycles == std::vector<int>{1, 2});
    }
    SUBCASE("a symmetric two-solution model yields the twin") {
        Function fn2 =
            parse("func two\nblock 0 freq=1\n  t1:$r1 <- li 1\n  t2:$r2 <- li 2\n  jr $r13\n");
        VariantSet vs = run_maxdiv(fn2, isa(), config(Algorithm::MaxDiv, 2, 0.0, 7));
        REQUIRE(vs.solutions.size() == 2);
        CHECK(vs.solutions[1].cycles != vs.solutions[0].cycles);
    }
    SUBCASE("exhaustion stops the loop early") {
        VariantSet vs = run_maxdiv(fn, isa(), config(Algorithm::MaxDiv, 10, 0.5, 7));
        CHECK(vs.solutions.size() == 3);
        CHECK(vs.stop_reason == "exhausted");
    }
}

TEST_CASE("DLNS degenerates to LNS-quality output on a single block") {
    Function fn = oracle::load_bench("gdpair");
    DiversifyConfig cfg = config(Algorithm::DLNS, 6, 0.2, 13);
    cfg.max_attempts = 40;
    VariantSet vs = run_dlns(fn, isa(), cfg);
    CHECK(vs.solutions.size() >= 2);
    CHECK(check_variant_set(vs, fn, isa(), cfg.spec).empty());
}

TEST_CASE("DLNS diversifies the global register assignment across iterations") {
    Function fn = oracle::load_bench("dual");
    DiversifyConfig cfg = config(Algorithm::DLNS, 8, 0.3, 17);
    cfg.max_attempts = 60;
    // force several global iterations before k is reached
    cfg.locals_per_block = 2;
    cfg.combine_attempts = 2;
    VariantSet vs = run_dlns(fn, isa(), cfg);
    CHECK(vs.solutions.size() >= 3);
    CHECK(check_variant_set(vs, fn, isa(), cfg.spec).empty());
    // the lone cross-block temp should visit several registers
    int t3 = fn.temp_index("t3");
    REQUIRE(t3 >= 0);
    int operand = -1;
    for (const Instruction& ins : fn.instructions)
        for (size_t o = 0; o < ins.operands.size(); ++o)
            if (ins.operands[o].temp == t3 && operand < 0)
                operand = fn.operand_base[static_cast<size_t>(ins.id)] + static_cast<int>(o);
    std::set<int> regs;
    for (const auto& s : vs.solutions) regs.insert(s.regs[static_cast<size_t>(operand)]);
    CHECK(regs.size() >= 2);
}

TEST_CASE("every DLNS output respects the gap bound on tightly budgeted blocks") {
    Function fn = oracle::load_bench("straddle");
    DiversifyConfig cfg = config(Algorithm::DLNS, 8, 0.10, 23);
    cfg.max_attempts = 40;
    VariantSet vs = run_dlns(fn, isa(), cfg);
    for (const auto& s : vs.solutions) CHECK(s.cost <= vs.bound);
    CHECK(check_variant_set(vs, fn, isa(), cfg.spec).empty());
}

TEST_CASE("diversification is deterministic per seed") {
    Function fn = oracle::load_bench("fact");
    for (Algorithm algo : {Algorithm::LNS, Algorithm::RS, Algorithm::DLNS}) {
        DiversifyConfig cfg = config(algo, 5, 0.10, 99);
        cfg.max_attempts = 80;
        VariantSet a = diversify(fn, isa(), cfg);
        VariantSet b = diversify(fn, isa(), cfg);
        CHECK(a.solutions == b.solutions);
    }
}

TEST_CASE("LNS and RS both fill small variant budgets") {
    Function fn = oracle::load_bench("fact");
    DiversifyConfig lns_cfg = config(Algorithm::LNS, 12, 0.10, 31);
    DiversifyConfig rs_cfg = config(Algorithm::RS, 12, 0.10, 31);
    VariantSet l = run_lns(fn, isa(), lns_cfg);
    VariantSet r = run_rs(fn, isa(), rs_cfg);
    CHECK(l.solutions.size() == 12);
    CHECK(r.solutions.size() == 12);
    CHECK(check_variant_set(l, fn, isa(), lns_cfg.spec).empty());
    CHECK(check_variant_set(r, fn, isa(), rs_cfg.spec, true).empty());
}
