#pragma once

// Commutative case: finite metric spaces, discrete measures and the
// bounded-Lipschitz / Kantorovich distances between them, each computed as a
// small linear program over the values of a test function at the points.

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "qlip/lp.hpp"
#include "qlip/solver_config.hpp"

namespace qlip {

class FiniteMetricSpace {
public:
    /// Validates symmetry, zero diagonal, positivity off the diagonal and the
    /// triangle inequality (within 1e-12). Throws InvalidMetric.
    FiniteMetricSpace(std::vector<std::string> labels, std::vector<std::vector<double>> rho);

    /// Points of the real line with the absolute-difference metric.
    static FiniteMetricSpace line(const std::vector<double>& positions);

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::vector<std::vector<double>>& rho() const noexcept { return rho_; }
    double distance(std::size_t i, std::size_t j) const { return rho_[i][j]; }
    double diameter() const;

    FiniteMetricSpace scaled(double t) const;

    bool operator==(const FiniteMetricSpace&) const = default;

private:
    std::vector<std::string> labels_;
    std::vector<std::vector<double>> rho_;
};

using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;

class DiscreteMeasure {
public:
    static constexpr double kMassTol = 1e-12;

    /// Weights must be nonnegative with total mass in (0, 1 + 1e-12].
    DiscreteMeasure(SpacePtr space, std::vector<double> weights);

    static DiscreteMeasure point_mass(SpacePtr space, std::size_t index);
    /// (1 - t) a + t b
    static DiscreteMeasure mix(const DiscreteMeasure& a, const DiscreteMeasure& b, double t);

    const SpacePtr& space() const noexcept { return space_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    double mass() const noexcept;
    bool is_state() const noexcept;

    /// Integral of the function given by its values at the points.
    double pair(const std::vector<double>& values) const;

private:
    SpacePtr space_;
    std::vector<double> weights_;
};

bool same_space(const DiscreteMeasure& a, const DiscreteMeasure& b);

/// A test function attaining a distance. alpha is infinite for Kantorovich
/// witnesses.
struct LipBoundedWitness {
    std::vector<double> values;
    double alpha = std::numeric_limits<double>::infinity();
    double beta = 1.0;

    double sup_norm() const;
    double lipschitz_constant(const FiniteMetricSpace& space) const;
    /// |f_i| <= alpha + tol and |f_i - f_j| <= beta rho_ij + tol.
    bool feasible(const FiniteMetricSpace& space, double tol = 1e-9) const;
};

struct DistanceResult {
    double value = 0.0;
    LipBoundedWitness witness;
};

/// maximize sum_i (mu_i - nu_i) f_i over |f_i| <= alpha, |f_i - f_j| <= beta rho_ij.
/// Pass alpha = +inf for the Kantorovich program, in which f_0 is pinned to 0.
LinearProgram bl_program(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double alpha,
                         double beta);

DistanceResult bl_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double alpha,
                           double beta, const SolverConfig& config = {});

DistanceResult kantorovich(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double beta = 1.0,
                           const SolverConfig& config = {});

struct FamilyRatio {
    double d_ab = 0.0;
    double d_11 = 0.0;
};

FamilyRatio bl_family_ratio(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double alpha,
                            double beta, const SolverConfig& config = {});

struct MidpointCheck {
    double lhs = 0.0; // d(mix(phi, psi), psi)
    double rhs = 0.0; // d(phi, psi) / 2
};

MidpointCheck midpoint_check(const DiscreteMeasure& phi, const DiscreteMeasure& psi, double alpha,
                             double beta, const SolverConfig& config = {});

struct WeakStarSeries {
    std::vector<double> pairings;   // phi_n(g)
    std::vector<double> deviations; // |phi_n(g) - limit(g)|
    bool converged = false;
};

struct WeakStarReport {
    double limit_tol = 1e-6;
    std::vector<WeakStarSeries> series; // one per test function
    bool all_converged() const;
};

/// Pairs every measure of the sequence with each test function. A series
/// counts as converged when the maximal deviation over the last quarter of
/// the sequence is below 1e-6; this is evidence, not proof.
WeakStarReport weakstar_probe(const std::vector<DiscreteMeasure>& seq, const DiscreteMeasure& limit,
                              const std::vector<std::vector<double>>& test_fns);

} // namespace qlip
