#include "qlip/classical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qlip/error.hpp"

namespace qlip {

namespace {

std::string format_label(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

void require_states(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    if (!same_space(mu, nu)) throw SpaceMismatch("measures live on different spaces");
    if (!mu.is_state() || !nu.is_state())
        throw NotAState("distances are defined on states only (total mass must be 1)");
}

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) throw InvalidArgument(std::string(name) + " must be positive");
}

} // namespace

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::string> labels,
                                     std::vector<std::vector<double>> rho)
    : labels_(std::move(labels)), rho_(std::move(rho)) {
    const std::size_t n = labels_.size();
    if (n == 0) throw InvalidMetric("metric space needs at least one point");
    if (rho_.size() != n) throw InvalidMetric("rho must have one row per label");
    for (std::size_t i = 0; i < n; ++i) {
        if (rho_[i].size() != n) throw InvalidMetric("rho row " + std::to_string(i) + " has wrong length");
        if (rho_[i][i] != 0.0) throw InvalidMetric("rho diagonal must be zero");
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (!(rho_[i][j] > 0.0) || !std::isfinite(rho_[i][j]))
                throw InvalidMetric("rho[" + std::to_string(i) + "][" + std::to_string(j) +
                                    "] must be positive and finite");
            if (rho_[i][j] != rho_[j][i]) throw InvalidMetric("rho must be symmetric");
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                if (rho_[i][k] > rho_[i][j] + rho_[j][k] + 1e-12 * std::max(1.0, rho_[i][k]))
                    throw InvalidMetric("triangle inequality fails at (" + std::to_string(i) + "," +
                                        std::to_string(j) + "," + std::to_string(k) + ")");
}

FiniteMetricSpace FiniteMetricSpace::line(const std::vector<double>& positions) {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> rho(positions.size(), std::vector<double>(positions.size()));
    for (std::size_t i = 0; i < positions.size(); ++i) {
        labels.push_back(format_label(positions[i]));
        for (std::size_t j = 0; j < positions.size(); ++j)
            rho[i][j] = std::abs(positions[i] - positions[j]);
    }
    return FiniteMetricSpace(std::move(labels), std::move(rho));
}

double FiniteMetricSpace::diameter() const {
    double d = 0.0;
    for (const auto& row : rho_)
        for (double v : row) d = std::max(d, v);
    return d;
}

FiniteMetricSpace FiniteMetricSpace::scaled(double t) const {
    require_positive(t, "scale");
    auto rho = rho_;
    for (auto& row : rho)
        for (auto& v : row) v *= t;
    return FiniteMetricSpace(labels_, std::move(rho));
}

// ---------------------------------------------------------------------------

DiscreteMeasure::DiscreteMeasure(SpacePtr space, std::vector<double> weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
    if (!space_) throw InvalidMeasure("measure needs a space");
    if (weights_.size() != space_->size())
        throw InvalidMeasure("measure has " + std::to_string(weights_.size()) + " weights for " +
                             std::to_string(space_->size()) + " points");
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidMeasure("weights must be nonnegative");
        total += w;
    }
    if (!(total > 0.0) || total > 1.0 + kMassTol)
        throw InvalidMeasure("total mass must lie in (0, 1]");
}

DiscreteMeasure DiscreteMeasure::point_mass(SpacePtr space, std::size_t index) {
    if (!space || index >= space->size()) throw InvalidMeasure("point mass index out of range");
    std::vector<double> w(space->size(), 0.0);
    w[index] = 1.0;
    return DiscreteMeasure(std::move(space), std::move(w));
}

DiscreteMeasure DiscreteMeasure::mix(const DiscreteMeasure& a, const DiscreteMeasure& b, double t) {
    if (!same_space(a, b)) throw SpaceMismatch("cannot mix measures on different spaces");
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("mixing weight must lie in [0, 1]");
    std::vector<double> w(a.weights_.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = (1.0 - t) * a.weights_[i] + t * b.weights_[i];
    return DiscreteMeasure(a.space_, std::move(w));
}

double DiscreteMeasure::mass() const noexcept {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
}

bool DiscreteMeasure::is_state() const noexcept { return std::abs(mass() - 1.0) <= kMassTol; }

double DiscreteMeasure::pair(const std::vector<double>& values) const {
    if (values.size() != weights_.size()) throw DimensionMismatch("function and measure sizes differ");
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += weights_[i] * values[i];
    return s;
}

bool same_space(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    return a.space() == b.space() || *a.space() == *b.space();
}

// ---------------------------------------------------------------------------

double LipBoundedWitness::sup_norm() const {
    double s = 0.0;
    for (double v : values) s = std::max(s, std::abs(v));
    return s;
}

double LipBoundedWitness::lipschitz_constant(const FiniteMetricSpace& space) const {
    double l = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j)
            l = std::max(l, std::abs(values[i] - values[j]) / space.distance(i, j));
    return l;
}

bool LipBoundedWitness::feasible(const FiniteMetricSpace& space, double tol) const {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::abs(values[i]) > alpha + tol) return false;
        for (std::size_t j = i + 1; j < values.size(); ++j)
            if (std::abs(values[i] - values[j]) > beta * space.distance(i, j) + tol) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

LinearProgram bl_program(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double alpha,
                         double beta) {
    if (!same_space(mu, nu)) throw SpaceMismatch("measures live on different spaces");
    require_positive(alpha, "alpha");
    require_positive(beta, "beta");
    const auto& space = *mu.space();
    const std::size_t n = space.size();

    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = mu.weights()[i] - nu.weights()[i];
    LinearProgram p(std::move(c));

    auto row = [n](std::size_t i, double vi, std::size_t j = SIZE_MAX, double vj = 0.0) {
        std::vector<double> r(n, 0.0);
        r[i] = vi;
        if (j != SIZE_MAX) r[j] = vj;
        return r;
    };
    if (std::isinf(alpha)) {
        // Constants are invisible to the objective; pin f_0 to keep the region pointed.
        p.add_le(row(0, 1.0), 0.0).add_le(row(0, -1.0), 0.0);
    } else {
        for (std::size_t i = 0; i < n; ++i) p.add_le(row(i, 1.0), alpha).add_le(row(i, -1.0), alpha);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double bound = beta * space.distance(i, j);
            p.add_le(row(i, 1.0, j, -1.0), bound).add_le(row(i, -1.0, j, 1.0), bound);
        }
    return p;
}

namespace {

DistanceResult solve_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double alpha,
                              double beta, const SolverConfig& config) {
    require_states(mu, nu);
    const auto program = bl_program(mu, nu, alpha, beta);
    const auto sol = lp_solve(program, config);
    switch (sol.status) {
    case LpStatus::Optimal: break;
    case LpStatus::IterationLimit:
        throw IterationLimit("simplex hit the pivot cap of " + std::to_string(config.max_pivots));
    default:
        throw Error("distance program unexpectedly " + std::string(to_string(sol.status)));
    }
    DistanceResult out;
    out.value = std::max(0.0, sol.optimal_value);
    out.witness.values = sol.witness;
    out.witness.alpha = alpha;
    out.witness.beta = beta;
    return out;
}

} // namespace

DistanceResult bl_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double alpha,
                           double beta, const SolverConfig& config) {
    if (std::isinf(alpha)) throw InvalidArgument("alpha must be finite; use kantorovich");
    return solve_distance(mu, nu, alpha, beta, config);
}

DistanceResult kantorovich(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double beta,
                           const SolverConfig& config) {
    return solve_distance(mu, nu, std::numeric_limits<double>::infinity(), beta, config);
}

FamilyRatio bl_family_ratio(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double alpha,
                            double beta, const SolverConfig& config) {
    FamilyRatio r;
    r.d_ab = bl_distance(mu, nu, alpha, beta, config).value;
    r.d_11 = (alpha == 1.0 && beta == 1.0) ? r.d_ab : bl_distance(mu, nu, 1.0, 1.0, config).value;
    return r;
}

MidpointCheck midpoint_check(const DiscreteMeasure& phi, const DiscreteMeasure& psi, double alpha,
                             double beta, const SolverConfig& config) {
    require_states(phi, psi);
    const auto eta = DiscreteMeasure::mix(phi, psi, 0.5);
    return {bl_distance(eta, psi, alpha, beta, config).value,
            0.5 * bl_distance(phi, psi, alpha, beta, config).value};
}

bool WeakStarReport::all_converged() const {
    return std::all_of(series.begin(), series.end(), [](const auto& s) { return s.converged; });
}

WeakStarReport weakstar_probe(const std::vector<DiscreteMeasure>& seq, const DiscreteMeasure& limit,
                              const std::vector<std::vector<double>>& test_fns) {
    for (const auto& m : seq)
        if (!same_space(m, limit)) throw SpaceMismatch("sequence and limit live on different spaces");

    WeakStarReport report;
    const std::size_t n = seq.size();
    const std::size_t tail_start = n - (n + 3) / 4; // last quarter, rounded up
    for (const auto& g : test_fns) {
        WeakStarSeries s;
        const double target = limit.pair(g);
        double tail_max = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double v = seq[k].pair(g);
            s.pairings.push_back(v);
            s.deviations.push_back(std::abs(v - target));
            if (k >= tail_start) tail_max = std::max(tail_max, s.deviations.back());
        }
        s.converged = tail_max < report.limit_tol;
        report.series.push_back(std::move(s));
    }
    return report;
}

} // namespace qlip
