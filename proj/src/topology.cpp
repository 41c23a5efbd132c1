#include "qlip/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qlip/error.hpp"

namespace qlip {

namespace {

constexpr double kUnitNormTol = 1e-10;

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        std::ostringstream os;
        os << what << ": dimension " << a << " does not match " << b;
        throw DimensionMismatch(os.str());
    }
}

HermitianElement projection_onto_first(std::size_t dim, std::size_t count) {
    std::vector<double> d(dim, 0.0);
    std::fill(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(std::min(count, dim)), 1.0);
    return HermitianElement::diagonal(d);
}

HermitianElement power(const HermitianElement& m, unsigned k) {
    ComplexMatrix acc = ComplexMatrix::identity(m.dim());
    for (unsigned i = 0; i < k; ++i) acc = acc * m.matrix();
    return HermitianElement::hermitian_part(acc);
}

} // namespace

StateSampleSet::StateSampleSet(std::vector<DensityMatrix> states) : states_(std::move(states)) {
    if (states_.empty()) throw InvalidArgument("state sample set must be nonempty");
    for (const auto& s : states_) require_same_dim(s.dim(), states_.front().dim(), "state sample set");
}

double p_K(const ComplexMatrix& a, const StateSampleSet& K) {
    require_same_dim(a.dim(), K.dim(), "p_K");
    double best = 0.0;
    for (const auto& s : K.states()) best = std::max(best, std::abs(s.pair(a)));
    return best;
}

double q_K(const ComplexMatrix& a, const StateSampleSet& K) {
    require_same_dim(a.dim(), K.dim(), "q_K");
    const ComplexMatrix adj = a.adjoint();
    const ComplexMatrix left = adj * a;
    const ComplexMatrix right = a * adj;
    double best = 0.0;
    for (const auto& s : K.states()) {
        // Both pairings are real and nonnegative up to rounding.
        const double l = std::max(0.0, s.pair(left).real());
        const double r = std::max(0.0, s.pair(right).real());
        best = std::max({best, std::sqrt(l), std::sqrt(r)});
    }
    return best;
}

double inductive_seminorm(const ComplexMatrix& a, const HermitianElement& e) {
    require_same_dim(a.dim(), e.dim(), "inductive seminorm");
    return operator_norm(e.matrix() * a * e.matrix());
}

void require_strictly_positive(const HermitianElement& h, bool require_unit_norm) {
    const auto eig = hermitian_eig(h);
    if (eig.eigenvalues.empty() || eig.eigenvalues.front() <= 0.0) {
        std::ostringstream os;
        os << "h is not strictly positive (min eigenvalue "
           << (eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.front()) << ")";
        throw NotStrictlyPositive(os.str());
    }
    if (require_unit_norm && std::abs(eig.eigenvalues.back() - 1.0) > kUnitNormTol) {
        std::ostringstream os;
        os << "h must have unit operator norm, got " << eig.eigenvalues.back();
        throw NormalizationError(os.str());
    }
}

StrictPair strict_seminorms(const ComplexMatrix& a, const HermitianElement& h) {
    require_same_dim(a.dim(), h.dim(), "strict seminorms");
    require_strictly_positive(h, false);
    return {operator_norm(h.matrix() * a), operator_norm(a * h.matrix())};
}

double wu_metric(const ComplexMatrix& a, const ComplexMatrix& b, const HermitianElement& h) {
    require_same_dim(a.dim(), b.dim(), "wu metric");
    require_same_dim(a.dim(), h.dim(), "wu metric");
    require_strictly_positive(h, true);
    return operator_norm(h.matrix() * (b - a) * h.matrix());
}

HermitianElement harmonic_h(std::size_t dim) {
    std::vector<double> d(dim);
    for (std::size_t k = 0; k < dim; ++k) d[k] = 1.0 / static_cast<double>(k + 1);
    return HermitianElement::diagonal(d);
}

// ---------------------------------------------------------------------------

BreakpointFunction::BreakpointFunction(std::vector<std::pair<double, double>> points)
    : points_(std::move(points)) {
    if (points_.size() < 2) throw InvalidUnitSpec("breakpoint table needs at least two points");
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (!(points_[i].first > points_[i - 1].first))
            throw InvalidUnitSpec("breakpoint abscissae must be strictly increasing");
        if (points_[i].second < points_[i - 1].second)
            throw InvalidUnitSpec("breakpoint function must be nondecreasing");
    }
    for (const auto& [x, y] : points_)
        if (!std::isfinite(x) || !std::isfinite(y)) throw InvalidUnitSpec("breakpoint table is not finite");
    if (std::abs((*this)(0.0)) > 1e-12 || std::abs((*this)(1.0) - 1.0) > 1e-12)
        throw InvalidUnitSpec("breakpoint function must satisfy f(0) = 0 and f(1) = 1");
}

double BreakpointFunction::operator()(double x) const {
    if (x <= points_.front().first) return points_.front().second;
    if (x >= points_.back().first) return points_.back().second;
    const auto it = std::upper_bound(points_.begin(), points_.end(), x,
                                     [](double v, const auto& p) { return v < p.first; });
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    const double t = (x - x0) / (x1 - x0);
    return y0 + t * (y1 - y0);
}

std::string_view to_string(UnitKind k) noexcept {
    switch (k) {
    case UnitKind::TruncationProjections: return "TruncationProjections";
    case UnitKind::PsUnit: return "PsUnit";
    case UnitKind::SpectralUnit: return "SpectralUnit";
    }
    return "?";
}

void ApproximateUnitSpec::validate() const {
    if (h.dim() == 0) throw InvalidUnitSpec("approximate unit needs a nonempty h");
    require_strictly_positive(h, true);
    switch (kind) {
    case UnitKind::TruncationProjections: break;
    case UnitKind::PsUnit:
        if (functions.empty()) throw InvalidUnitSpec("PsUnit needs at least one function");
        break;
    case UnitKind::SpectralUnit:
        if (thresholds.empty()) throw InvalidUnitSpec("SpectralUnit needs at least one threshold");
        for (std::size_t i = 0; i < thresholds.size(); ++i) {
            if (!(thresholds[i] > 0.0 && thresholds[i] <= 1.0))
                throw InvalidUnitSpec("SpectralUnit thresholds must lie in (0, 1]");
            if (i > 0 && !(thresholds[i] < thresholds[i - 1]))
                throw InvalidUnitSpec("SpectralUnit thresholds must be strictly decreasing");
        }
        break;
    }
}

std::size_t ApproximateUnitSpec::size() const {
    switch (kind) {
    case UnitKind::TruncationProjections: return h.dim();
    case UnitKind::PsUnit: return functions.size();
    case UnitKind::SpectralUnit: return thresholds.size();
    }
    return 0;
}

HermitianElement ApproximateUnitSpec::element(std::size_t n) const {
    if (n >= size()) throw InvalidArgument("approximate unit index out of range");
    switch (kind) {
    case UnitKind::TruncationProjections: return projection_onto_first(h.dim(), n + 1);
    case UnitKind::PsUnit: return functional_calculus(h, functions[n]);
    case UnitKind::SpectralUnit: {
        const double t = thresholds[n];
        return functional_calculus(h, [t](double x) { return x >= t ? 1.0 : 0.0; });
    }
    }
    return {};
}

HermitianElement ApproximateUnitSpec::complement_power(std::size_t n, unsigned p) const {
    if (n >= size()) throw InvalidArgument("approximate unit index out of range");
    switch (kind) {
    case UnitKind::TruncationProjections:
        return power(HermitianElement::identity(h.dim()) - element(n), p);
    case UnitKind::PsUnit: {
        const auto& f = functions[n];
        return functional_calculus(h, [&f, p](double x) { return std::pow(1.0 - f(x), static_cast<double>(p)); });
    }
    case UnitKind::SpectralUnit: {
        const double t = thresholds[n];
        return functional_calculus(h, [t](double x) { return x >= t ? 0.0 : 1.0; });
    }
    }
    return {};
}

SeminormReport ps_unit_condition_check(const ApproximateUnitSpec& spec, const StateSampleSet& K,
                                       const std::vector<unsigned>& alphas) {
    spec.validate();
    require_same_dim(spec.h.dim(), K.dim(), "ps-unit check");
    for (unsigned a : alphas)
        if (a == 0) throw InvalidArgument("exponents must be positive integers");

    SeminormReport rep;
    rep.alphas = alphas;
    const std::size_t n_units = spec.size();
    // One eigendecomposition of h serves every functional-calculus unit.
    const auto eig = hermitian_eig(spec.h);
    for (std::size_t n = 0; n < n_units; ++n) {
        std::vector<double> row;
        row.reserve(alphas.size());
        for (unsigned a : alphas) {
            HermitianElement c;
            switch (spec.kind) {
            case UnitKind::TruncationProjections: c = spec.complement_power(n, a); break;
            case UnitKind::PsUnit: {
                const auto& f = spec.functions[n];
                c = apply_spectral(eig, [&f, a](double x) { return std::pow(1.0 - f(x), static_cast<double>(a)); });
                break;
            }
            case UnitKind::SpectralUnit: {
                const double t = spec.thresholds[n];
                c = apply_spectral(eig, [t](double x) { return x >= t ? 0.0 : 1.0; });
                break;
            }
            }
            row.push_back(p_K(c, K));
        }
        rep.values.push_back(std::move(row));
    }

    for (std::size_t k = 0; k < alphas.size(); ++k) {
        bool mono = true;
        for (std::size_t n = 1; n < n_units; ++n)
            if (rep.values[n][k] > rep.values[n - 1][k] + 1e-12) mono = false;
        rep.monotone.push_back(mono);
        const double first = rep.values.empty() ? 0.0 : rep.values.front()[k];
        const double last = rep.values.empty() ? 0.0 : rep.values.back()[k];
        rep.converged.push_back(last < 1e-6 * first || last < 1e-9);
    }
    return rep;
}

// ---------------------------------------------------------------------------

ComplexMatrix shift_operator(std::size_t dim, std::size_t n) { return ComplexMatrix::unit(dim, n, 0); }

ShiftReport counterexample_shift(std::size_t N) {
    if (N < 4) throw InvalidArgument("shift counterexample needs N >= 4");
    std::vector<double> d(N);
    for (std::size_t k = 0; k < N; ++k) d[k] = 1.0 / static_cast<double>(k + 1);
    return counterexample_shift(d);
}

ShiftReport counterexample_shift(const std::vector<double>& h_diag) {
    const std::size_t N = h_diag.size();
    if (N < 4) throw InvalidArgument("shift counterexample needs N >= 4");
    const HermitianElement h = HermitianElement::diagonal(h_diag);
    require_strictly_positive(h, true);

    ShiftReport rep;
    rep.dim = N;
    rep.h = h_diag;
    const ComplexMatrix zero = ComplexMatrix::zeros(N);
    std::vector<ComplexMatrix> adjoints;
    adjoints.reserve(N);
    for (std::size_t n = 0; n < N; ++n) {
        const ComplexMatrix s = shift_operator(N, n);
        rep.wu_shift.push_back(wu_metric(s, zero, h));
        rep.wu_square.push_back(wu_metric(s.adjoint() * s, zero, h));
        adjoints.push_back(s.adjoint());
        rep.strict_left_adjoint.push_back(operator_norm(h.matrix() * adjoints.back()));
    }
    rep.strict_pairs.assign(N, std::vector<double>(N, 0.0));
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t m = n + 1; m < N; ++m) {
            const double v = operator_norm(h.matrix() * (adjoints[n] - adjoints[m]));
            rep.strict_pairs[n][m] = rep.strict_pairs[m][n] = v;
        }

    const double h0 = h_diag[0];
    rep.wu_strictly_decreasing = true;
    for (std::size_t n = 1; n < N; ++n)
        if (!(rep.wu_shift[n] < rep.wu_shift[n - 1])) rep.wu_strictly_decreasing = false;
    rep.wu_square_constant = std::all_of(rep.wu_square.begin(), rep.wu_square.end(),
                                         [&](double v) { return std::abs(v - h0 * h0) <= 1e-12; });
    rep.strict_pairs_equal = true;
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t m = 0; m < N; ++m)
            if (n != m && std::abs(rep.strict_pairs[n][m] - h0 * std::sqrt(2.0)) > 1e-10)
                rep.strict_pairs_equal = false;
    return rep;
}

// ---------------------------------------------------------------------------

double element_distance(const ElementMetric& m, const ComplexMatrix& a, const ComplexMatrix& b) {
    return std::visit(
        [&](const auto& metric) -> double {
            using M = std::decay_t<decltype(metric)>;
            if constexpr (std::is_same_v<M, WuMetric>) {
                return wu_metric(a, b, metric.h);
            } else if constexpr (std::is_same_v<M, StrictLeft>) {
                return strict_seminorms(a - b, metric.h).left;
            } else if constexpr (std::is_same_v<M, StrictRight>) {
                return strict_seminorms(a - b, metric.h).right;
            } else {
                require_same_dim(a.dim(), b.dim(), "norm distance");
                return operator_norm(a - b);
            }
        },
        m);
}

std::vector<std::size_t> greedy_net(const std::vector<ComplexMatrix>& elements, const ElementMetric& metric,
                                    double eps) {
    if (elements.empty()) throw InvalidArgument("covering number of an empty set");
    if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");

    std::vector<std::size_t> net{0};
    std::vector<double> gap(elements.size());
    for (std::size_t i = 0; i < elements.size(); ++i)
        gap[i] = i == 0 ? 0.0 : element_distance(metric, elements[i], elements[0]);

    for (;;) {
        const auto far = std::max_element(gap.begin(), gap.end());
        if (*far <= eps) break;
        const auto next = static_cast<std::size_t>(far - gap.begin());
        net.push_back(next);
        for (std::size_t i = 0; i < elements.size(); ++i)
            if (gap[i] > 0.0) gap[i] = std::min(gap[i], element_distance(metric, elements[i], elements[next]));
        gap[next] = 0.0;
    }
    return net;
}

std::size_t covering_number(const std::vector<ComplexMatrix>& elements, const ElementMetric& metric, double eps) {
    return greedy_net(elements, metric, eps).size();
}

// ---------------------------------------------------------------------------

AgreementReport topology_agreement_probe(const std::vector<ComplexMatrix>& B, const HermitianElement& h,
                                         const std::vector<StateSampleSet>& K_family, double radius,
                                         double tol) {
    if (B.empty()) throw InvalidArgument("agreement probe needs at least one element");
    require_strictly_positive(h, true);
    for (const auto& b : B) {
        require_same_dim(b.dim(), h.dim(), "agreement probe");
        if (operator_norm(b) > radius + 1e-12) throw InvalidArgument("element exceeds the declared radius");
    }
    for (const auto& K : K_family) require_same_dim(K.dim(), h.dim(), "agreement probe");

    AgreementReport rep;
    const auto eig = hermitian_eig(h);
    const double h_norm = eig.eigenvalues.back();
    rep.h_inverse_norm = 1.0 / eig.eigenvalues.front();
    const double su_const = std::max(std::pow(rep.h_inverse_norm, 4), 1.0);
    const ComplexMatrix& hm = h.matrix();
    const ComplexMatrix h2 = hm * hm;

    rep.h_central = std::all_of(B.begin(), B.end(), [&](const ComplexMatrix& b) {
        return (hm * b - b * hm).frobenius_norm() <= 1e-14 * std::max(1.0, b.frobenius_norm());
    });

    for (std::size_t i = 0; i < B.size(); ++i) {
        for (std::size_t j = i; j < B.size(); ++j) {
            if (i == j && B.size() > 1) continue;
            PairComparison pc;
            pc.i = i;
            pc.j = j;
            const ComplexMatrix x = B[i] - B[j];
            pc.norm = operator_norm(x);
            pc.wu = operator_norm(hm * x * hm);
            pc.strict_left = operator_norm(hm * x);
            pc.strict_right = operator_norm(x * hm);
            const double strict = std::max(pc.strict_left, pc.strict_right);
            for (const auto& K : K_family) {
                const double p = p_K(x, K);
                const double q = q_K(x, K);
                pc.p.push_back(p);
                pc.q.push_back(q);
                if (p > q + tol) rep.p_le_q = false;
                if (q * q > su_const * (pc.strict_left * pc.strict_left + pc.strict_right * pc.strict_right) + tol)
                    rep.su_certificate = false;
            }
            if (pc.wu > h_norm * h_norm * pc.norm + tol) rep.wu_le_norm = false;
            pc.central_defect = std::max(std::abs(pc.wu - operator_norm(h2 * x)),
                                         std::abs(pc.wu - operator_norm(x * h2)));
            if (rep.h_central && pc.central_defect > 1e-12) rep.central_identity = false;

            if (pc.wu > 0.0) {
                rep.norm_over_wu = std::max(rep.norm_over_wu, pc.norm / pc.wu);
                rep.strict_over_wu = std::max(rep.strict_over_wu, strict / pc.wu);
            }
            if (strict > 0.0) rep.norm_over_strict = std::max(rep.norm_over_strict, pc.norm / strict);
            rep.pairs.push_back(std::move(pc));
        }
    }
    return rep;
}

} // namespace qlip
