#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mmd/simplex.hpp"

using namespace mmd;

TEST_CASE("simple maximization via negated objective") {
    // max x + y s.t. x + 2y <= 4, 3x + y <= 6  ->  optimum at (1.6, 1.2)
    LpProblem p;
    p.objective = {-1.0, -1.0};
    p.rows.push_back({{1.0, 2.0}, LpRelation::le, 4.0});
    p.rows.push_back({{3.0, 1.0}, LpRelation::le, 6.0});
    LpResult r = solve_lp(p);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.x[0] == doctest::Approx(1.6).epsilon(1e-9));
    CHECK(r.x[1] == doctest::Approx(1.2).epsilon(1e-9));
    CHECK(r.objective == doctest::Approx(-2.8).epsilon(1e-9));
}

TEST_CASE("equalities go through phase one") {
    // min x + y s.t. x + y = 1, x - y <= 0.2
    LpProblem p;
    p.objective = {1.0, 1.0};
    p.rows.push_back({{1.0, 1.0}, LpRelation::eq, 1.0});
    p.rows.push_back({{1.0, -1.0}, LpRelation::le, 0.2});
    LpResult r = solve_lp(p);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.x[0] + r.x[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("negative right-hand sides are handled") {
    // min x s.t. -x <= -3  (x >= 3)
    LpProblem p;
    p.objective = {1.0};
    p.rows.push_back({{-1.0}, LpRelation::le, -3.0});
    LpResult r = solve_lp(p);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.x[0] == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("infeasible program is reported") {
    // x <= 1 and x >= 2 cannot hold together
    LpProblem p;
    p.objective = {1.0};
    p.rows.push_back({{1.0}, LpRelation::le, 1.0});
    p.rows.push_back({{-1.0}, LpRelation::le, -2.0});
    CHECK(solve_lp(p).status == LpStatus::infeasible);
}

TEST_CASE("unbounded program is reported") {
    LpProblem p;
    p.objective = {-1.0, 0.0};
    p.rows.push_back({{0.0, 1.0}, LpRelation::le, 1.0});
    CHECK(solve_lp(p).status == LpStatus::unbounded);
}

TEST_CASE("redundant equalities survive phase one") {
    LpProblem p;
    p.objective = {1.0, 2.0};
    p.rows.push_back({{1.0, 1.0}, LpRelation::eq, 1.0});
    p.rows.push_back({{2.0, 2.0}, LpRelation::eq, 2.0});  // same hyperplane
    LpResult r = solve_lp(p);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("degenerate vertices do not cycle") {
    // several constraints meet at the origin-adjacent optimum
    LpProblem p;
    p.objective = {-0.75, 150.0, -0.02, 6.0};
    p.rows.push_back({{0.25, -60.0, -0.04, 9.0}, LpRelation::le, 0.0});
    p.rows.push_back({{0.5, -90.0, -0.02, 3.0}, LpRelation::le, 0.0});
    p.rows.push_back({{0.0, 0.0, 1.0, 0.0}, LpRelation::le, 1.0});
    LpResult r = solve_lp(p);  // the classic cycling example resolves at -0.05
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.objective == doctest::Approx(-0.05).epsilon(1e-9));
}

TEST_CASE("matching pennies game value") {
    // min t s.t. both column responses <= t, strategy on the simplex
    LpProblem p;
    p.objective = {0.0, 0.0, 1.0};
    p.rows.push_back({{1.0, 0.0, -1.0}, LpRelation::le, 0.0});
    p.rows.push_back({{0.0, 1.0, -1.0}, LpRelation::le, 0.0});
    p.rows.push_back({{1.0, 1.0, 0.0}, LpRelation::eq, 1.0});
    LpResult r = solve_lp(p);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.objective == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.x[0] == doctest::Approx(0.5).epsilon(1e-9));
}
