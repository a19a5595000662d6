#include "mosaic/solver.hpp"

#include "oracle.hpp"

#include <doctest.h>

#include <set>

using namespace mosaic;

namespace {
const IsaTable& isa() { return mini_mips(); }

Function parse(const std::string& text) { return parse_function(text, isa()); }
} // namespace

TEST_CASE("a unit-latency chain costs three cycles") {
    Function fn = oracle::load_bench("chain3");
    OptimizationResult opt = optimize(build_model(fn, isa()), SearchParams{});
    CHECK(opt.o == 3);
    CHECK(opt.proven);
    CHECK(oracle::min_cost(fn, isa()) == 3);
}

TEST_CASE("optimization matches exhaustive enumeration on small functions") {
    for (const char* id : {"nano", "chain3", "pair2", "gdpair", "press", "dual", "straddle", "fact"}) {
        INFO(id);
        Function fn = oracle::load_bench(id);
        SearchParams p;
        p.seed = 5;
        OptimizationResult opt = optimize(build_model(fn, isa()), p);
        CHECK(opt.proven);
        CHECK(opt.o == oracle::min_cost(fn, isa()));
        CHECK(validate_solution(fn, isa(), opt.y_opt).empty());
    }
}

TEST_CASE("factorial optimum is 55") {
    Function fn = oracle::load_bench("fact");
    OptimizationResult opt = optimize(build_model(fn, isa()), SearchParams{});
    CHECK(opt.o == 55);
}

TEST_CASE("a gap of zero on a unique-optimum model returns that optimum") {
    Function fn = parse("func one\nblock 0 freq=1\n  jr $r13\n");
    ConstraintModel m = build_model(fn, isa());
    post_gap_constraint(m, 1, 0.0);
    SolveResult r = solve_next(m, SearchParams{});
    REQUIRE(r.status == SolveStatus::Solution);
    CHECK(r.solution->cycles[0] == 0);
    CHECK(r.solution->cost == 1);
}

TEST_CASE("random branching reaches both solutions of a two-solution model") {
    Function fn = parse("func two\nblock 0 freq=1\n  t1:$r1 <- li 1\n  t2:$r2 <- li 2\n  jr $r13\n");
    ConstraintModel m = build_model(fn, isa());
    post_gap_constraint(m, 3, 0.0);
    CHECK(oracle::enumerate_solutions(fn, isa(), {3, SIZE_MAX}).size() == 2);
    std::set<std::vector<int>> seen;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        SearchParams p;
        p.branching = Branching::Random;
        p.seed = seed;
        SolveResult r = solve_next(m, p);
        REQUIRE(r.status == SolveStatus::Solution);
        seen.insert(r.solution->cycles);
    }
    CHECK(seen.size() == 2);
}

TEST_CASE("contradictory precedences exhaust without a solution") {
    Function fn =
        parse("func unsat\nblock 0 freq=1\n  t1 <- li 1\n  t2 <- li 2\n  jr $r13\n  dep 0 1\n  dep 1 0\n");
    ConstraintModel m = build_model(fn, isa());
    SolveResult r = solve_next(m, SearchParams{});
    CHECK(r.status == SolveStatus::Exhausted);
    CHECK_FALSE(r.solution.has_value());
}

TEST_CASE("relax pins exactly the undestroyed variables") {
    Function fn = oracle::load_bench("pair2");
    ConstraintModel m = build_model(fn, isa());
    SearchParams params;
    params.seed = 9;
    Searcher s(m, params);
    SolveResult first = s.solve_next();
    REQUIRE(first.status == SolveStatus::Solution);

    SUBCASE("rate zero reproduces the solution") {
        Rng rng(1);
        PartialAssignment pa = relax(*first.solution, m, 0.0, rng);
        for (char f : pa.fixed) CHECK(f == 1);
        SolveResult repaired = s.solve_once(&pa);
        REQUIRE(repaired.status == SolveStatus::Solution);
        CHECK(*repaired.solution == *first.solution);
    }
    SUBCASE("rate one frees everything") {
        Rng rng(1);
        PartialAssignment pa = relax(*first.solution, m, 1.0, rng);
        for (char f : pa.fixed) CHECK(f == 0);
    }
    SUBCASE("destruction count is binomial in the rate") {
        Rng rng(7);
        double destroyed = 0;
        const int trials = 1000;
        for (int t = 0; t < trials; ++t) {
            PartialAssignment pa = relax(*first.solution, m, 0.6, rng);
            for (char f : pa.fixed)
                if (!f) destroyed += 1;
        }
        double mean = destroyed / trials;
        double expect = 0.6 * static_cast<double>(m.num_vars());
        CHECK(mean > expect - 0.5);
        CHECK(mean < expect + 0.5);
    }
}

TEST_CASE("identical seeds give identical solution sequences") {
    Function fn = oracle::load_bench("gdpair");
    ConstraintModel m = build_model(fn, isa());
    post_gap_constraint(m, oracle::min_cost(fn, isa()), 0.2);
    auto run = [&m](uint64_t seed) {
        SearchParams p;
        p.branching = Branching::Random;
        p.seed = seed;
        Searcher s(m, p);
        std::vector<SolutionAssignment> out;
        for (int i = 0; i < 5; ++i) {
            SolveResult r = s.solve_next();
            REQUIRE(r.status == SolveStatus::Solution);
            out.push_back(*r.solution);
        }
        return out;
    };
    CHECK(run(3) == run(3));
    CHECK(run(3) != run(4));
}

TEST_CASE("re-running propagation at a fixpoint changes no domain") {
    Function fn = oracle::load_bench("fact");
    ConstraintModel m = build_model(fn, isa());
    post_gap_constraint(m, 55, 0.1);
    Searcher s(m, SearchParams{});
    auto first = s.root_domains();
    s.refresh_root();
    CHECK(s.root_domains() == first);
}

TEST_CASE("time limits surface as timeouts with best-so-far flagged unproven") {
    Function fn = oracle::load_bench("grand120");
    ConstraintModel m = build_model(fn, isa());
    SearchParams p;
    p.time_limit = 0.0; // expire immediately
    CHECK_THROWS_AS(optimize(m, p), ModelError);
}
