#pragma once

// Dense linear programming over free variables:
//
//   maximize c.x  subject to  a_i.x <= b_i  or  a_i.x = b_i.
//
// lp_solve runs a two-phase primal simplex on the slack-form tableau with
// Bland's rule; lp_oracle enumerates basic points and is only meant as an
// independent check on small instances.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qlip/solver_config.hpp"

namespace qlip {

enum class Relation { LessEqual, Equal };

struct Constraint {
    std::vector<double> coeffs;
    Relation relation = Relation::LessEqual;
    double bound = 0.0;
};

class LinearProgram {
public:
    explicit LinearProgram(std::vector<double> objective);

    /// Throws DimensionMismatch when the row length differs from num_vars().
    LinearProgram& add(std::vector<double> coeffs, Relation rel, double bound);
    LinearProgram& add_le(std::vector<double> coeffs, double bound) {
        return add(std::move(coeffs), Relation::LessEqual, bound);
    }
    LinearProgram& add_eq(std::vector<double> coeffs, double bound) {
        return add(std::move(coeffs), Relation::Equal, bound);
    }

    std::size_t num_vars() const noexcept { return objective_.size(); }
    std::span<const double> objective() const noexcept { return objective_; }
    std::span<const Constraint> constraints() const noexcept { return constraints_; }

    double evaluate(std::span<const double> x) const;
    /// Largest violation of any constraint at x (0 when feasible).
    double max_violation(std::span<const double> x) const;

    /// Same program with the objective multiplied by t.
    LinearProgram scaled_objective(double t) const;

private:
    std::vector<double> objective_;
    std::vector<Constraint> constraints_;
};

enum class LpStatus { Optimal, Unbounded, Infeasible, IterationLimit };

std::string_view to_string(LpStatus s) noexcept;

struct LpSolution {
    double optimal_value = 0.0;
    std::vector<double> witness;
    LpStatus status = LpStatus::Optimal;
    std::int64_t pivots = 0;
};

LpSolution lp_solve(const LinearProgram& p, const SolverConfig& config = {});

struct OracleLimits {
    std::size_t max_vars = 8;
    std::size_t max_constraints = 24;
};

/// Max objective over all basic feasible points. Throws TooLarge outside the
/// limits and InvalidArgument when no basic feasible point exists.
double lp_oracle(const LinearProgram& p, const OracleLimits& limits = {});

} // namespace qlip
