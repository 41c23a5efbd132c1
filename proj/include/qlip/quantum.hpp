#pragma once

// Matrix-algebra case. States are density matrices; the seminorm is either a
// commutator seminorm a -> ||[D, a]|| on M_d or the matrix-valued Lipschitz
// seminorm on grid functions X -> M_k. The bounded-Lipschitz distance is
// computed by an augmented-penalty operator splitting (ADMM) whose returned
// value is always the pairing at a feasible witness, so it is a certified
// lower bound on the true supremum.

#include <cstdint>
#include <variant>
#include <vector>

#include "qlip/classical.hpp"
#include "qlip/error.hpp"
#include "qlip/numlin.hpp"
#include "qlip/solver_config.hpp"

namespace qlip {

class DensityMatrix {
public:
    static constexpr double kTol = 1e-10;

    /// Eigenvalues >= -1e-10 and trace 1 within 1e-10, else InvalidState.
    explicit DensityMatrix(HermitianElement m);

    /// Pure state |e_i><e_i|.
    static DensityMatrix basis_state(std::size_t dim, std::size_t i);
    /// Block-diagonal density matrix of a state of C(X, M_k) given by
    /// nonnegative matrix weights per point.
    static DensityMatrix from_blocks(const std::vector<HermitianElement>& blocks);

    std::size_t dim() const noexcept { return m_.dim(); }
    const HermitianElement& matrix() const noexcept { return m_; }

    /// trace(rho a)
    Complex pair(const ComplexMatrix& a) const { return trace_product(m_.matrix(), a); }

private:
    HermitianElement m_;
};

struct CommutatorSeminorm {
    HermitianElement D;
};

struct MatrixLipSeminorm {
    SpacePtr base;
    std::size_t fiber_dim = 1;
};

using Seminorm = std::variant<CommutatorSeminorm, MatrixLipSeminorm>;

/// Element of C(X, M_k) at finite X: one hermitian fiber per point.
struct MatrixGridElement {
    SpacePtr space;
    std::vector<HermitianElement> fibers;

    void validate(std::size_t fiber_dim) const;
    /// Block-diagonal matrix of dimension |X| k.
    HermitianElement block_diagonal() const;
};

/// max_{x != y} ||f(x) - f(y)|| / rho(x, y); fibers need not be hermitian.
double grid_lipschitz(const FiniteMetricSpace& space, const std::vector<ComplexMatrix>& fibers);
/// max_x ||f(x)||
double grid_sup_norm(const std::vector<ComplexMatrix>& fibers);

double seminorm_eval(const CommutatorSeminorm& L, const HermitianElement& a);
/// Full seminorm max{l(a), sup_x ||a(x)||}.
double seminorm_eval(const MatrixLipSeminorm& L, const MatrixGridElement& a);
/// Lipschitz part l(a) alone.
double lipschitz_part(const MatrixLipSeminorm& L, const MatrixGridElement& a);

/// Dimension of the density matrices the seminorm acts on.
std::size_t algebra_dim(const Seminorm& L);

struct SolverLogEntry {
    std::int64_t iter = 0;
    double certified_value = 0.0; // best feasible pairing so far
    double primal_res = 0.0;
    double dual_res = 0.0;
    double penalty = 0.0;
};

struct MatrixDistanceResult {
    double value = 0.0;
    HermitianElement witness;   // feasible: ||a|| <= alpha, L(a) <= beta
    std::int64_t iters = 0;
    double primal_res = 0.0;
    double dual_res = 0.0;
    double norm_slack = 0.0;     // alpha - ||witness||
    double seminorm_slack = 0.0; // beta - L(witness)
    std::vector<SolverLogEntry> log;

    double feasibility_slack() const { return std::min(norm_slack, seminorm_slack); }
};

/// Raised when the splitting solver exhausts max_iters above tolerance. The
/// best certified result so far travels with the exception.
class SolverStalled : public Error {
public:
    SolverStalled(const std::string& what, MatrixDistanceResult partial)
        : Error(what), partial_(std::move(partial)) {}
    const char* kind() const noexcept override { return "SolverStalled"; }
    const MatrixDistanceResult& partial() const noexcept { return partial_; }

private:
    MatrixDistanceResult partial_;
};

/// sup { trace((rho1 - rho2) a) : a hermitian, ||a|| <= alpha, L(a) <= beta }.
MatrixDistanceResult bl_distance_matrix(const DensityMatrix& rho1, const DensityMatrix& rho2,
                                        const Seminorm& L, double alpha, double beta,
                                        const SolverConfig& config = {});

struct NullSpaceReport {
    std::size_t nullity = 0;
    bool scalars_only = false; // null space is exactly R 1
    std::vector<HermitianElement> null_basis;
};

/// Orthonormal (Frobenius) basis of the d x d hermitian matrices.
std::vector<HermitianElement> hermitian_basis(std::size_t dim);
/// Basis of C(X, M_k)^sa as grid elements.
std::vector<MatrixGridElement> grid_basis(const SpacePtr& space, std::size_t fiber_dim);

/// Kernel of a -> [D, a] restricted to span(basis).
NullSpaceReport seminorm_null_check(const CommutatorSeminorm& L,
                                    const std::vector<HermitianElement>& basis);
/// Kernel of the Lipschitz part l restricted to span(basis). Null elements
/// are reported as block-diagonal matrices.
NullSpaceReport seminorm_null_check(const MatrixLipSeminorm& L,
                                    const std::vector<MatrixGridElement>& basis);

struct DiameterScan {
    double diameter = 0.0;
    std::size_t first = 0, second = 0;
};

DiameterScan diameter_scan(const std::vector<DensityMatrix>& states, const Seminorm& L, double alpha,
                           double beta, const SolverConfig& config = {});

} // namespace qlip
