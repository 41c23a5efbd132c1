#include <doctest.h>

#include <cmath>

#include "qlip/quantum.hpp"
#include "test_support.hpp"

using namespace qlip;
using qlip::testing::random_density;
using qlip::testing::random_hermitian;
using qlip::testing::random_probability;
using qlip::testing::random_space;

namespace {

CommutatorSeminorm two_point_triple(Complex m) {
    return {HermitianElement(ComplexMatrix::from_rows({{0.0, m}, {std::conj(m), 0.0}}))};
}

// max (s - t) over the diagonal witnesses diag(s, t) on a grid of step h.
double diagonal_sweep(double abs_m, double alpha, double beta, double h) {
    double best = 0.0;
    const int steps = static_cast<int>(std::round(2.0 * alpha / h));
    for (int i = 0; i <= steps; ++i)
        for (int j = 0; j <= steps; ++j) {
            const double s = -alpha + i * h, t = -alpha + j * h;
            if (abs_m * std::abs(s - t) <= beta + 1e-12) best = std::max(best, s - t);
        }
    return best;
}

bool feasible(const MatrixDistanceResult& r, double alpha, double beta, const Seminorm& L) {
    if (operator_norm(r.witness) > alpha + 1e-8) return false;
    double sem = 0.0;
    if (const auto* c = std::get_if<CommutatorSeminorm>(&L)) {
        sem = seminorm_eval(*c, r.witness);
    } else {
        const auto& g = std::get<MatrixLipSeminorm>(L);
        MatrixGridElement e{g.base, {}};
        const std::size_t k = g.fiber_dim;
        for (std::size_t x = 0; x < g.base->size(); ++x) {
            ComplexMatrix b(k);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) b(i, j) = r.witness.matrix()(x * k + i, x * k + j);
            e.fibers.push_back(HermitianElement::hermitian_part(b));
        }
        sem = seminorm_eval(g, e);
    }
    return sem <= beta + 1e-8;
}

} // namespace

TEST_CASE("DensityMatrix validation") {
    CHECK_THROWS_AS(DensityMatrix(HermitianElement::diagonal({0.5, 0.6})), InvalidState);
    CHECK_THROWS_AS(DensityMatrix(HermitianElement::diagonal({1.5, -0.5})), InvalidState);
    CHECK_NOTHROW(DensityMatrix(HermitianElement::diagonal({0.25, 0.75})));
    const auto e = DensityMatrix::basis_state(3, 1);
    CHECK(e.pair(ComplexMatrix::diagonal({3.0, -1.0, 2.0})).real() == doctest::Approx(-1.0));
}

TEST_CASE("seminorm_eval: commutator") {
    const auto L = two_point_triple(Complex(1.2, -0.5));
    CHECK(seminorm_eval(L, HermitianElement::identity(2)) == doctest::Approx(0.0));
    const double abs_m = std::abs(Complex(1.2, -0.5));
    for (auto [a1, a2] : {std::pair{1.0, -2.0}, std::pair{0.3, 0.3}, std::pair{-0.7, 2.5}}) {
        CHECK(seminorm_eval(L, HermitianElement::diagonal({a1, a2})) ==
              doctest::Approx(abs_m * std::abs(a1 - a2)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(seminorm_eval(L, HermitianElement::identity(3)), DimensionMismatch);
}

TEST_CASE("seminorm_eval: grid") {
    SplitMix64 rng(1);
    const auto X = random_space(rng, 4);
    const MatrixLipSeminorm L{X, 3};
    const auto M = random_hermitian(rng, 3);
    const MatrixGridElement constant{X, std::vector<HermitianElement>(4, M)};
    CHECK(lipschitz_part(L, constant) == doctest::Approx(0.0));
    CHECK(seminorm_eval(L, constant) == doctest::Approx(operator_norm(M)).epsilon(1e-12));

    // fiber_dim 1 reduces to the classical Lipschitz constant.
    const MatrixLipSeminorm L1{X, 1};
    std::vector<double> f{0.3, -0.2, 0.9, 0.1};
    MatrixGridElement g{X, {}};
    for (double v : f) g.fibers.push_back(HermitianElement::diagonal({v}));
    LipBoundedWitness w{f, 1.0, 1.0};
    CHECK(lipschitz_part(L1, g) == doctest::Approx(w.lipschitz_constant(*X)).epsilon(1e-12));

    const MatrixGridElement short_grid{X, std::vector<HermitianElement>(3, M)};
    CHECK_THROWS_AS(seminorm_eval(L, short_grid), DimensionMismatch);
}

TEST_CASE("bl_distance_matrix: equal states") {
    SplitMix64 rng(2);
    const DensityMatrix rho(random_density(rng, 3));
    const CommutatorSeminorm L{random_hermitian(rng, 3)};
    const auto r = bl_distance_matrix(rho, rho, L, 1.0, 1.0);
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("bl_distance_matrix: two-point spectral triple") {
    const auto e11 = DensityMatrix::basis_state(2, 0);
    const auto e22 = DensityMatrix::basis_state(2, 1);
    const auto r = bl_distance_matrix(e11, e22, two_point_triple(2.0), 10.0, 1.0);
    CHECK(std::abs(r.value - 0.5) <= 1e-4);
    CHECK(r.value <= 0.5 + 1e-9); // certified lower bound
    CHECK(std::abs(diagonal_sweep(2.0, 10.0, 1.0, 1.0 / 64.0) - 0.5) <= 1e-12);
    CHECK(feasible(r, 10.0, 1.0, two_point_triple(2.0)));

    // A complex off-diagonal entry only matters through its modulus.
    const auto rc = bl_distance_matrix(e11, e22, two_point_triple(std::polar(2.0, 0.7)), 10.0, 1.0);
    CHECK(std::abs(rc.value - 0.5) <= 1e-4);
}

TEST_CASE("bl_distance_matrix: fiber dimension one matches the classical program") {
    SplitMix64 rng(3);
    const auto X = random_space(rng, 4);
    const auto w1 = random_probability(rng, 4);
    const auto w2 = random_probability(rng, 4);
    const auto r = bl_distance_matrix(DensityMatrix(HermitianElement::diagonal(w1)),
                                      DensityMatrix(HermitianElement::diagonal(w2)),
                                      MatrixLipSeminorm{X, 1}, 1.0, 1.0);
    const double lp = bl_distance(DiscreteMeasure(X, w1), DiscreteMeasure(X, w2), 1.0, 1.0).value;
    CHECK(std::abs(r.value - lp) <= 1e-4);
}

TEST_CASE("bl_distance_matrix: errors") {
    const auto L = two_point_triple(1.0);
    CHECK_THROWS_AS(bl_distance_matrix(DensityMatrix::basis_state(3, 0), DensityMatrix::basis_state(3, 1), L, 1, 1),
                    DimensionMismatch);
    SolverConfig cfg;
    cfg.max_iters = 3;
    try {
        SplitMix64 rng(4);
        const CommutatorSeminorm L3{random_hermitian(rng, 3)};
        (void)bl_distance_matrix(DensityMatrix(random_density(rng, 3)), DensityMatrix(random_density(rng, 3)), L3,
                                 1.0, 1.0, cfg);
        FAIL("expected SolverStalled");
    } catch (const SolverStalled& e) {
        CHECK(e.partial().iters == 3);
        CHECK(e.partial().primal_res + e.partial().dual_res > cfg.tol);
    }
    cfg.max_iters = 0;
    CHECK_THROWS_AS(bl_distance_matrix(DensityMatrix::basis_state(2, 0), DensityMatrix::basis_state(2, 1), L, 1, 1, cfg),
                    InvalidArgument);
}

TEST_CASE("seminorm_null_check") {
    const auto basis = hermitian_basis(2);
    auto rep = seminorm_null_check(CommutatorSeminorm{HermitianElement::diagonal({0.0, 1.0})}, basis);
    CHECK(rep.nullity == 2);
    CHECK_FALSE(rep.scalars_only);

    rep = seminorm_null_check(two_point_triple(1.0), basis);
    CHECK(rep.nullity == 2);
    CHECK_FALSE(rep.scalars_only);
    // Every null element lies in span{1, D}: it commutes with D.
    for (const auto& n : rep.null_basis)
        CHECK(seminorm_eval(two_point_triple(1.0), n) <= 1e-12);

    // Generic D on M_3 has only scalars in its commutant.
    SplitMix64 rng(5);
    rep = seminorm_null_check(CommutatorSeminorm{random_hermitian(rng, 3)}, hermitian_basis(3));
    CHECK(rep.nullity == 3); // commutant of a generic hermitian = its polynomials

    const auto X = std::make_shared<const FiniteMetricSpace>(FiniteMetricSpace::line({0.0, 1.0}));
    const MatrixLipSeminorm grid{X, 1};
    rep = seminorm_null_check(grid, grid_basis(X, 1));
    CHECK(rep.nullity == 1);
    CHECK(rep.scalars_only);

    const MatrixLipSeminorm grid2{X, 2};
    rep = seminorm_null_check(grid2, grid_basis(X, 2));
    CHECK(rep.nullity == 4); // constant M_2-valued functions
    CHECK_FALSE(rep.scalars_only);
}

TEST_CASE("hermitian_basis is Frobenius-orthonormal") {
    const auto b = hermitian_basis(3);
    REQUIRE(b.size() == 9);
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            CHECK(trace_product(b[i].matrix(), b[j].matrix()).real() == doctest::Approx(i == j ? 1.0 : 0.0));
}

TEST_CASE("diameter_scan") {
    const auto L = two_point_triple(1.0);
    const auto e11 = DensityMatrix::basis_state(2, 0);
    CHECK(diameter_scan({e11, e11}, L, 1.0, 1.0).diameter == doctest::Approx(0.0).epsilon(1e-12));
    const auto d = diameter_scan({e11, DensityMatrix::basis_state(2, 1)}, L, 1.0, 1e6);
    CHECK(std::abs(d.diameter - 2.0) <= 1e-4);
    CHECK(d.diameter <= 2.0 + 1e-6);
    CHECK_THROWS_AS(diameter_scan({e11}, L, 1.0, 1.0), InvalidArgument);

    SplitMix64 rng(6);
    std::vector<DensityMatrix> states;
    for (int i = 0; i < 5; ++i) states.emplace_back(random_density(rng, 3, i % 2 ? 1 : 0));
    const CommutatorSeminorm L3{random_hermitian(rng, 3)};
    CHECK(diameter_scan(states, L3, 1.0, 1.0).diameter <= 2.0 + 1e-6);
}

TEST_CASE("bl_distance_matrix: feasibility, symmetry and certified log") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t dim = rng.range(2, 4);
        const double alpha = rng.uniform(0.3, 2.0), beta = rng.uniform(0.3, 2.0);
        const Seminorm L = CommutatorSeminorm{random_hermitian(rng, dim)};
        const DensityMatrix a(random_density(rng, dim, trial % 3 == 0 ? 1 : 0));
        const DensityMatrix b(random_density(rng, dim));
        const auto ab = bl_distance_matrix(a, b, L, alpha, beta);
        const auto ba = bl_distance_matrix(b, a, L, alpha, beta);
        CHECK(feasible(ab, alpha, beta, L));
        CHECK(ab.feasibility_slack() >= -1e-8);
        CHECK(std::abs(ab.value - ba.value) <= 2e-4);
        CHECK(ab.value <= 2.0 * alpha + 1e-6);
        CHECK(std::abs(ab.value - a.pair(ab.witness).real() + b.pair(ab.witness).real()) <= 1e-12);
        for (std::size_t k = 1; k < ab.log.size(); ++k)
            CHECK(ab.log[k].certified_value >= ab.log[k - 1].certified_value);
    }
}

TEST_CASE("bl_distance_matrix: grid instances agree with the LP") {
    SplitMix64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = rng.range(2, 5);
        const auto X = random_space(rng, n);
        const auto w1 = random_probability(rng, n);
        const auto w2 = random_probability(rng, n);
        const double alpha = rng.uniform(0.3, 2.0), beta = rng.uniform(0.3, 2.0);
        const Seminorm L = MatrixLipSeminorm{X, 1};
        const auto r = bl_distance_matrix(DensityMatrix(HermitianElement::diagonal(w1)),
                                          DensityMatrix(HermitianElement::diagonal(w2)), L, alpha, beta);
        // L(a) <= beta also bounds sup |a|, so the classical bound is min(alpha, beta).
        const double lp =
            bl_distance(DiscreteMeasure(X, w1), DiscreteMeasure(X, w2), std::min(alpha, beta), beta).value;
        CHECK(std::abs(r.value - lp) <= 1e-4);
        CHECK(r.value <= lp + 1e-9);
        CHECK(feasible(r, alpha, beta, L));
    }
}

TEST_CASE("bl_distance_matrix: grid with matrix fibers") {
    SplitMix64 rng(9);
    const auto X = random_space(rng, 3);
    const Seminorm L = MatrixLipSeminorm{X, 2};
    std::vector<HermitianElement> b1, b2;
    for (int x = 0; x < 3; ++x) {
        b1.push_back(random_density(rng, 2) * (1.0 / 3.0));
        b2.push_back(random_density(rng, 2) * (1.0 / 3.0));
    }
    const auto r = bl_distance_matrix(DensityMatrix::from_blocks(b1), DensityMatrix::from_blocks(b2), L, 1.0, 1.0);
    CHECK(feasible(r, 1.0, 1.0, L));
    CHECK(r.value > 0.0);
    CHECK(r.value <= 2.0 + 1e-6);
}

TEST_CASE("bl_distance_matrix: separation") {
    SplitMix64 rng(10);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t dim = rng.range(2, 4);
        const Seminorm L = CommutatorSeminorm{random_hermitian(rng, dim)};
        const auto r1 = random_density(rng, dim);
        const double eps = trial % 2 ? 1e-9 : 1e-2;
        const DensityMatrix a(r1);
        const DensityMatrix b(r1 * (1.0 - eps) + random_density(rng, dim) * eps);
        const double d = bl_distance_matrix(a, b, L, 1.0, 1.0).value;
        const double frob = (a.matrix() - b.matrix()).matrix().frobenius_norm();
        if (d <= 1e-6) CHECK(frob <= 1e-4);
        if (frob > 1e-4) CHECK(d > 1e-6);
    }
}
