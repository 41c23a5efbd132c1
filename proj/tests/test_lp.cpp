#include <doctest.h>

#include <cmath>

#include "qlip/error.hpp"
#include "qlip/lp.hpp"
#include "qlip/rng.hpp"
#include "test_support.hpp"

using namespace qlip;
using qlip::testing::random_program;

TEST_CASE("lp_solve: one-variable bound") {
    LinearProgram p({1.0});
    p.add_le({1.0}, 3.0).add_le({-1.0}, 0.0);
    const auto s = lp_solve(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.optimal_value == doctest::Approx(3.0));
    CHECK(s.witness[0] == doctest::Approx(3.0));
    CHECK(lp_oracle(p) == doctest::Approx(3.0));
}

TEST_CASE("lp_solve: two variables by hand") {
    LinearProgram p({1.0, 1.0});
    p.add_le({1.0, 0.0}, 1.0).add_le({0.0, 1.0}, 1.0).add_le({1.0, 1.0}, 1.5);
    p.add_le({-1.0, 0.0}, 0.0).add_le({0.0, -1.0}, 0.0);
    const auto s = lp_solve(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.optimal_value == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(p.max_violation(s.witness) <= 1e-9);
}

TEST_CASE("lp_oracle: two-point bounded-Lipschitz program") {
    // maximize f1 - f2 with |f_i| <= 1 and |f1 - f2| <= 1
    LinearProgram p({1.0, -1.0});
    p.add_le({1.0, 0.0}, 1.0).add_le({-1.0, 0.0}, 1.0);
    p.add_le({0.0, 1.0}, 1.0).add_le({0.0, -1.0}, 1.0);
    p.add_le({1.0, -1.0}, 1.0).add_le({-1.0, 1.0}, 1.0);
    CHECK(lp_oracle(p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lp_solve(p).optimal_value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lp_oracle: duplicated constraints leave the value unchanged") {
    LinearProgram p({2.0, 1.0});
    p.add_le({1.0, 0.0}, 1.0).add_le({0.0, 1.0}, 2.0).add_le({-1.0, 0.0}, 0.0).add_le({0.0, -1.0}, 0.0);
    const double plain = lp_oracle(p);
    LinearProgram dup = p;
    dup.add_le({1.0, 0.0}, 1.0).add_le({0.0, 1.0}, 2.0);
    CHECK(lp_oracle(dup) == doctest::Approx(plain).epsilon(1e-14));
    CHECK(plain == doctest::Approx(4.0));
    CHECK(lp_solve(dup).optimal_value == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("lp_oracle: size limits") {
    LinearProgram p(std::vector<double>(9, 1.0));
    CHECK_THROWS_AS(lp_oracle(p), TooLarge);
    LinearProgram q({1.0});
    for (int i = 0; i < 25; ++i) q.add_le({1.0}, 1.0 + i);
    CHECK_THROWS_AS(lp_oracle(q), TooLarge);
    CHECK_NOTHROW(lp_oracle(q, {8, 32}));
}

TEST_CASE("LinearProgram rejects ragged rows") {
    LinearProgram p({1.0, 2.0});
    CHECK_THROWS_AS(p.add_le({1.0}, 1.0), DimensionMismatch);
}

TEST_CASE("lp_solve: equality and negative right-hand sides need phase one") {
    // maximize x + y subject to x + y = 1, x >= 0.25 (i.e. -x <= -0.25), y >= 0, x <= 2
    LinearProgram p({1.0, 2.0});
    p.add_eq({1.0, 1.0}, 1.0).add_le({-1.0, 0.0}, -0.25).add_le({0.0, -1.0}, 0.0).add_le({1.0, 0.0}, 2.0);
    const auto s = lp_solve(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.optimal_value == doctest::Approx(1.75).epsilon(1e-12));
    CHECK(lp_oracle(p) == doctest::Approx(1.75).epsilon(1e-12));
}

TEST_CASE("lp_solve: infeasible and unbounded programs are reported") {
    LinearProgram infeasible({1.0});
    infeasible.add_le({1.0}, -1.0).add_le({-1.0}, -1.0);
    CHECK(lp_solve(infeasible).status == LpStatus::Infeasible);

    LinearProgram unbounded({1.0, 0.0});
    unbounded.add_le({0.0, 1.0}, 1.0);
    CHECK(lp_solve(unbounded).status == LpStatus::Unbounded);
}

TEST_CASE("lp_solve: pivot cap") {
    LinearProgram p({1.0, 1.0, 1.0});
    for (std::size_t j = 0; j < 3; ++j) {
        std::vector<double> e(3, 0.0);
        e[j] = 1.0;
        p.add_le(e, 1.0);
    }
    SolverConfig cfg;
    cfg.max_pivots = 1;
    CHECK(lp_solve(p, cfg).status == LpStatus::IterationLimit);
}

TEST_CASE("lp_solve agrees with the vertex oracle on random programs") {
    SplitMix64 rng(2024);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto p = random_program(rng);
        const auto s = lp_solve(p);
        REQUIRE(s.status == LpStatus::Optimal);
        CHECK(p.max_violation(s.witness) <= 1e-9);
        CHECK(std::abs(s.optimal_value - p.evaluate(s.witness)) <= 1e-9);
        CHECK(std::abs(s.optimal_value - lp_oracle(p)) <= 1e-9);
        ++checked;
    }
    CHECK(checked >= 200);
}

TEST_CASE("lp_solve: objective scaling and redundant constraints") {
    SplitMix64 rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = random_program(rng);
        const double base = lp_solve(p).optimal_value;
        const double t = rng.uniform(0.1, 10.0);
        const double scaled = lp_solve(p.scaled_objective(t)).optimal_value;
        CHECK(std::abs(scaled - t * base) <= 1e-12 * std::max(1.0, std::abs(t * base)));

        // Sum of the first two rows is implied by them.
        LinearProgram r = p;
        const auto cons = p.constraints();
        std::vector<double> sum(p.num_vars());
        for (std::size_t j = 0; j < sum.size(); ++j) sum[j] = cons[0].coeffs[j] + cons[1].coeffs[j];
        r.add_le(sum, cons[0].bound + cons[1].bound);
        CHECK(std::abs(lp_solve(r).optimal_value - base) <= 1e-9);
    }
}

TEST_CASE("lp_solve is deterministic") {
    SplitMix64 rng(5);
    const auto p = random_program(rng);
    const auto a = lp_solve(p);
    const auto b = lp_solve(p);
    CHECK(a.witness == b.witness);
    CHECK(a.optimal_value == b.optimal_value);
}

TEST_CASE("lp_oracle: vacuous equality rows are ignored") {
    LinearProgram p({1.0, 1.0});
    p.add_le({1.0, 0.0}, 1.0);
    p.add_le({0.0, 1.0}, 2.0);
    p.add_le({-1.0, 0.0}, 0.0);
    p.add_le({0.0, -1.0}, 0.0);
    p.add_eq({0.0, 0.0}, 0.0);
    CHECK(lp_oracle(p) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(lp_solve(p).optimal_value == doctest::Approx(3.0).epsilon(1e-12));
}
