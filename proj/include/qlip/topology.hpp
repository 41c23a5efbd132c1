#pragma once

// Finite-truncation probes of the topologies on a C*-algebra: the seminorms
// p_K and q_K built from a sample of states, inductive and strict seminorms,
// the metric Delta(a, b) = ||h (b - a) h||, approximate units built by
// functional calculus on a strictly positive h, and covering numbers.
//
// At a fixed truncation every one of these topologies is the norm topology;
// what the probes expose is how the comparison constants between them grow
// with the truncation dimension.

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "qlip/numlin.hpp"
#include "qlip/quantum.hpp"

namespace qlip {

/// Finite stand-in for a weak*-compact set of states.
class StateSampleSet {
public:
    explicit StateSampleSet(std::vector<DensityMatrix> states);

    std::size_t dim() const noexcept { return states_.front().dim(); }
    std::size_t size() const noexcept { return states_.size(); }
    const std::vector<DensityMatrix>& states() const noexcept { return states_; }

private:
    std::vector<DensityMatrix> states_;
};

/// sup_K |phi(a)|
double p_K(const ComplexMatrix& a, const StateSampleSet& K);
/// sup_K max(sqrt(phi(a* a)), sqrt(phi(a a*)))
double q_K(const ComplexMatrix& a, const StateSampleSet& K);

/// ||e a e||
double inductive_seminorm(const ComplexMatrix& a, const HermitianElement& e);

struct StrictPair {
    double left = 0.0;  // ||h a||
    double right = 0.0; // ||a h||
};

StrictPair strict_seminorms(const ComplexMatrix& a, const HermitianElement& h);

/// ||h (b - a) h|| for strictly positive h with ||h|| = 1.
double wu_metric(const ComplexMatrix& a, const ComplexMatrix& b, const HermitianElement& h);

/// Throws NotStrictlyPositive when min eig(h) <= 0, and NormalizationError
/// when require_unit_norm and | ||h|| - 1 | > 1e-10.
void require_strictly_positive(const HermitianElement& h, bool require_unit_norm);

/// diag(1, 1/2, ..., 1/N): strictly positive, unit norm, spectrum accumulating at 0.
HermitianElement harmonic_h(std::size_t dim);

// ---------------------------------------------------------------------------
// Approximate units

/// Nondecreasing piecewise-linear function through the given breakpoints,
/// constant beyond the first and last one. Must satisfy f(0) = 0, f(1) = 1.
class BreakpointFunction {
public:
    explicit BreakpointFunction(std::vector<std::pair<double, double>> points);
    double operator()(double x) const;
    const std::vector<std::pair<double, double>>& points() const noexcept { return points_; }

private:
    std::vector<std::pair<double, double>> points_;
};

enum class UnitKind { TruncationProjections, PsUnit, SpectralUnit };

std::string_view to_string(UnitKind k) noexcept;

struct ApproximateUnitSpec {
    UnitKind kind = UnitKind::TruncationProjections;
    HermitianElement h;
    std::vector<BreakpointFunction> functions; // PsUnit: e_n = f_n(h)
    std::vector<double> thresholds;            // SpectralUnit: e_n = chi_[t_n, 1](h)

    /// Throws NotStrictlyPositive / NormalizationError / InvalidUnitSpec.
    void validate() const;
    std::size_t size() const;
    /// e_n
    HermitianElement element(std::size_t n) const;
    /// (1 - e_n)^power
    HermitianElement complement_power(std::size_t n, unsigned power) const;
};

struct SeminormReport {
    std::vector<unsigned> alphas;
    std::vector<std::vector<double>> values; // values[n][k] = p_K((1 - e_n)^alphas[k])
    std::vector<bool> converged;             // per alpha
    std::vector<bool> monotone;              // per alpha: nonincreasing within 1e-12
};

SeminormReport ps_unit_condition_check(const ApproximateUnitSpec& spec, const StateSampleSet& K,
                                       const std::vector<unsigned>& alphas);

// ---------------------------------------------------------------------------
// Shift counterexample

/// |e_n><e_0|
ComplexMatrix shift_operator(std::size_t dim, std::size_t n);

struct ShiftReport {
    std::size_t dim = 0;
    std::vector<double> h;                   // diagonal of h
    std::vector<double> wu_shift;            // Delta(S_n, 0), n = 0..N-1
    std::vector<double> wu_square;           // Delta(S_n* S_n, 0)
    std::vector<double> strict_left_adjoint; // ||h S_n*||
    std::vector<std::vector<double>> strict_pairs; // ||h (S_n* - S_m*)||
    bool wu_strictly_decreasing = false;
    bool wu_square_constant = false;         // within 1e-12 of h_0^2
    bool strict_pairs_equal = false;         // within 1e-10 of h_0 sqrt(2)
    bool ok() const { return wu_strictly_decreasing && wu_square_constant && strict_pairs_equal; }
};

/// Uses harmonic_h(N). N >= 4.
ShiftReport counterexample_shift(std::size_t N);
/// Uses the given diagonal for h; it must be positive with max entry 1.
ShiftReport counterexample_shift(const std::vector<double>& h_diag);

// ---------------------------------------------------------------------------
// Covering numbers

struct WuMetric { HermitianElement h; };
struct StrictLeft { HermitianElement h; };
struct StrictRight { HermitianElement h; };
struct NormMetric {};

using ElementMetric = std::variant<WuMetric, StrictLeft, StrictRight, NormMetric>;

double element_distance(const ElementMetric& m, const ComplexMatrix& a, const ComplexMatrix& b);

/// Indices of the greedy farthest-point eps-net, seeded at index 0.
std::vector<std::size_t> greedy_net(const std::vector<ComplexMatrix>& elements, const ElementMetric& metric,
                                    double eps);
std::size_t covering_number(const std::vector<ComplexMatrix>& elements, const ElementMetric& metric, double eps);

// ---------------------------------------------------------------------------
// Topology comparison

struct PairComparison {
    std::size_t i = 0, j = 0;
    double norm = 0.0;
    double wu = 0.0;
    double strict_left = 0.0;
    double strict_right = 0.0;
    std::vector<double> p;   // p_K(a_i - a_j) per sample set
    std::vector<double> q;   // q_K(a_i - a_j) per sample set
    double central_defect = 0.0; // max(|wu - ||h^2 x|||, |wu - ||x h^2|||), x = a_i - a_j
};

struct AgreementReport {
    std::vector<PairComparison> pairs;
    bool h_central = false;             // h commutes with every element of B
    double h_inverse_norm = 0.0;        // ||h^-1||
    double norm_over_wu = 0.0;          // max ||x|| / Delta(x)
    double strict_over_wu = 0.0;        // max max(||hx||, ||xh||) / Delta(x)
    double norm_over_strict = 0.0;      // max ||x|| / max(||hx||, ||xh||)
    bool p_le_q = true;
    bool wu_le_norm = true;             // Delta(x) <= ||h||^2 ||x||
    bool su_certificate = true;         // q_K(x)^2 <= max(||h^-1||^4, 1) (||hx||^2 + ||xh||^2)
    bool central_identity = true;       // only meaningful when h_central
    bool ok() const { return p_le_q && wu_le_norm && su_certificate && (!h_central || central_identity); }
};

AgreementReport topology_agreement_probe(const std::vector<ComplexMatrix>& B, const HermitianElement& h,
                                         const std::vector<StateSampleSet>& K_family, double radius,
                                         double tol = 1e-10);

} // namespace qlip
