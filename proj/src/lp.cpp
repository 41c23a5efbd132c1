#include "qlip/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qlip/error.hpp"

namespace qlip {

LinearProgram::LinearProgram(std::vector<double> objective) : objective_(std::move(objective)) {
    if (objective_.empty()) throw InvalidArgument("linear program needs at least one variable");
}

LinearProgram& LinearProgram::add(std::vector<double> coeffs, Relation rel, double bound) {
    if (coeffs.size() != objective_.size())
        throw DimensionMismatch("constraint row has " + std::to_string(coeffs.size()) +
                                " coefficients, program has " +
                                std::to_string(objective_.size()) + " variables");
    constraints_.push_back({std::move(coeffs), rel, bound});
    return *this;
}

double LinearProgram::evaluate(std::span<const double> x) const {
    double v = 0.0;
    for (std::size_t j = 0; j < objective_.size(); ++j) v += objective_[j] * x[j];
    return v;
}

double LinearProgram::max_violation(std::span<const double> x) const {
    double worst = 0.0;
    for (const auto& c : constraints_) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < c.coeffs.size(); ++j) lhs += c.coeffs[j] * x[j];
        const double v = c.relation == Relation::Equal ? std::abs(lhs - c.bound) : lhs - c.bound;
        worst = std::max(worst, v);
    }
    return worst;
}

LinearProgram LinearProgram::scaled_objective(double t) const {
    LinearProgram out = *this;
    for (auto& c : out.objective_) c *= t;
    return out;
}

std::string_view to_string(LpStatus s) noexcept {
    switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Unbounded: return "Unbounded";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::IterationLimit: return "IterationLimit";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Simplex

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;

class Tableau {
public:
    // Column layout: [x+ (n)] [x- (n)] [slack per <= row] [artificial per row that needs one]
    explicit Tableau(const LinearProgram& p) : n_(p.num_vars()) {
        const auto cons = p.constraints();
        std::size_t slacks = 0;
        for (const auto& c : cons) slacks += c.relation == Relation::LessEqual;

        std::vector<bool> needs_art(cons.size());
        std::size_t arts = 0;
        for (std::size_t i = 0; i < cons.size(); ++i) {
            needs_art[i] = cons[i].relation == Relation::Equal || cons[i].bound < 0.0;
            arts += needs_art[i];
        }
        first_art_ = 2 * n_ + slacks;
        cols_ = first_art_ + arts;

        rows_.assign(cons.size(), std::vector<double>(cols_ + 1, 0.0));
        basis_.assign(cons.size(), 0);
        std::size_t slack = 2 * n_, art = first_art_;
        for (std::size_t i = 0; i < cons.size(); ++i) {
            auto& row = rows_[i];
            const double sign = cons[i].bound < 0.0 ? -1.0 : 1.0;
            for (std::size_t j = 0; j < n_; ++j) {
                row[j] = sign * cons[i].coeffs[j];
                row[n_ + j] = -sign * cons[i].coeffs[j];
            }
            row[cols_] = sign * cons[i].bound;
            if (cons[i].relation == Relation::LessEqual) {
                row[slack] = sign;
                if (!needs_art[i]) basis_[i] = slack;
                ++slack;
            }
            if (needs_art[i]) {
                row[art] = 1.0;
                basis_[i] = art++;
            }
        }
    }

    bool has_artificials() const { return first_art_ < cols_; }

    // Maximize minus the sum of artificials. Returns the phase objective.
    LpStatus phase_one(std::int64_t& pivots, std::int64_t max_pivots) {
        std::vector<double> cost(cols_, 0.0);
        for (std::size_t j = first_art_; j < cols_; ++j) cost[j] = -1.0;
        price(cost);
        return iterate(pivots, max_pivots, cols_);
    }

    double objective_value() const { return -reduced_[cols_]; }

    // Pivot remaining zero-level artificials out of the basis, drop redundant
    // rows, then discard the artificial columns.
    void drop_artificials() {
        for (std::size_t i = 0; i < rows_.size();) {
            if (basis_[i] < first_art_) {
                ++i;
                continue;
            }
            std::size_t col = first_art_;
            for (std::size_t j = 0; j < first_art_; ++j)
                if (std::abs(rows_[i][j]) > 1e-9) {
                    col = j;
                    break;
                }
            if (col == first_art_) {
                rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(i));
                basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
                continue;
            }
            pivot(i, col);
            ++i;
        }
        for (auto& row : rows_) {
            row[first_art_] = row[cols_];
            row.resize(first_art_ + 1);
        }
        cols_ = first_art_;
    }

    LpStatus phase_two(const LinearProgram& p, std::int64_t& pivots, std::int64_t max_pivots) {
        std::vector<double> cost(cols_, 0.0);
        const auto c = p.objective();
        for (std::size_t j = 0; j < n_; ++j) {
            cost[j] = c[j];
            cost[n_ + j] = -c[j];
        }
        price(cost);
        return iterate(pivots, max_pivots, cols_);
    }

    std::vector<double> primal() const {
        std::vector<double> x(n_, 0.0);
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const std::size_t b = basis_[i];
            const double v = rows_[i][cols_];
            if (b < n_) x[b] += v;
            else if (b < 2 * n_) x[b - n_] -= v;
        }
        return x;
    }

private:
    void price(const std::vector<double>& cost) {
        reduced_.assign(cols_ + 1, 0.0);
        for (std::size_t j = 0; j < cols_; ++j) reduced_[j] = cost[j];
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const double cb = cost[basis_[i]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) reduced_[j] -= cb * rows_[i][j];
        }
    }

    LpStatus iterate(std::int64_t& pivots, std::int64_t max_pivots, std::size_t allowed) {
        for (;;) {
            // Bland: lowest-index improving column.
            std::size_t enter = allowed;
            for (std::size_t j = 0; j < allowed; ++j)
                if (reduced_[j] > kCostTol) {
                    enter = j;
                    break;
                }
            if (enter == allowed) return LpStatus::Optimal;

            // Ratio test; ties go to the lowest basic index.
            std::size_t leave = rows_.size();
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < rows_.size(); ++i) {
                const double a = rows_[i][enter];
                if (a <= kPivotTol) continue;
                const double ratio = std::max(rows_[i][cols_], 0.0) / a;
                if (leave == rows_.size()) {
                    best = ratio;
                    leave = i;
                    continue;
                }
                const double slack = 1e-12 * std::max(1.0, best);
                if (ratio < best - slack) {
                    best = ratio;
                    leave = i;
                } else if (ratio <= best + slack && basis_[i] < basis_[leave]) {
                    best = std::min(best, ratio);
                    leave = i;
                }
            }
            if (leave == rows_.size()) return LpStatus::Unbounded;
            if (pivots >= max_pivots) return LpStatus::IterationLimit;
            pivot(leave, enter);
            ++pivots;
        }
    }

    void pivot(std::size_t r, std::size_t c) {
        auto& prow = rows_[r];
        const double inv = 1.0 / prow[c];
        for (auto& v : prow) v *= inv;
        prow[c] = 1.0;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (i == r) continue;
            const double f = rows_[i][c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) rows_[i][j] -= f * prow[j];
            rows_[i][c] = 0.0;
        }
        const double f = reduced_[c];
        if (f != 0.0) {
            for (std::size_t j = 0; j <= cols_; ++j) reduced_[j] -= f * prow[j];
            reduced_[c] = 0.0;
        }
        basis_[r] = c;
    }

    std::size_t n_;
    std::size_t cols_ = 0;
    std::size_t first_art_ = 0;
    std::vector<std::vector<double>> rows_; // each row: coefficients then rhs
    std::vector<std::size_t> basis_;
    std::vector<double> reduced_;           // reduced costs, last entry = -objective
};

} // namespace

LpSolution lp_solve(const LinearProgram& p, const SolverConfig& config) {
    Tableau t(p);
    LpSolution out;
    if (t.has_artificials()) {
        const auto s = t.phase_one(out.pivots, config.max_pivots);
        if (s == LpStatus::IterationLimit) {
            out.status = s;
            return out;
        }
        if (t.objective_value() < -1e-9) {
            out.status = LpStatus::Infeasible;
            return out;
        }
        t.drop_artificials();
    }
    out.status = t.phase_two(p, out.pivots, config.max_pivots);
    out.witness = t.primal();
    out.optimal_value = p.evaluate(out.witness);
    return out;
}

// ---------------------------------------------------------------------------
// Vertex enumeration

namespace {

// Solves the square system in place by Gaussian elimination with partial
// pivoting. Returns false when the system is (numerically) singular.
bool solve_square(std::vector<std::vector<double>>& a, std::vector<double>& b) {
    const std::size_t n = b.size();
    double scale = 0.0;
    for (const auto& row : a)
        for (double v : row) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return n == 0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t i = col + 1; i < n; ++i)
            if (std::abs(a[i][col]) > std::abs(a[piv][col])) piv = i;
        if (std::abs(a[piv][col]) <= 1e-12 * scale) return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t i = col + 1; i < n; ++i) {
            const double f = a[i][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a[i][j] -= f * a[col][j];
            b[i] -= f * b[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * b[j];
        b[i] = s / a[i][i];
    }
    return true;
}

} // namespace

double lp_oracle(const LinearProgram& p, const OracleLimits& limits) {
    const std::size_t n = p.num_vars();
    const auto cons = p.constraints();
    if (n > limits.max_vars || cons.size() > limits.max_constraints)
        throw TooLarge("oracle limited to " + std::to_string(limits.max_vars) + " variables and " +
                       std::to_string(limits.max_constraints) + " constraints");

    std::vector<std::size_t> eq, ineq;
    for (std::size_t i = 0; i < cons.size(); ++i) {
        if (cons[i].relation != Relation::Equal) {
            ineq.push_back(i);
            continue;
        }
        // 0 = 0 carries no information and would make every basis singular.
        const bool zero_row =
            std::all_of(cons[i].coeffs.begin(), cons[i].coeffs.end(), [](double v) { return v == 0.0; });
        if (!zero_row)
            eq.push_back(i);
        else if (cons[i].bound != 0.0)
            throw InvalidArgument("program has no basic feasible point");
    }
    if (eq.size() > n) throw TooLarge("oracle needs at most as many equalities as variables");
    const std::size_t pick = n - eq.size();
    if (pick > ineq.size()) throw InvalidArgument("program has no basic points");

    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> idx(pick);
    for (std::size_t k = 0; k < pick; ++k) idx[k] = k;

    for (;;) {
        std::vector<std::vector<double>> a;
        std::vector<double> b;
        for (std::size_t i : eq) {
            a.push_back(cons[i].coeffs);
            b.push_back(cons[i].bound);
        }
        for (std::size_t k : idx) {
            a.push_back(cons[ineq[k]].coeffs);
            b.push_back(cons[ineq[k]].bound);
        }
        if (solve_square(a, b)) {
            double scale = 1.0;
            for (double v : b) scale = std::max(scale, std::abs(v));
            if (p.max_violation(b) <= 1e-9 * scale) best = std::max(best, p.evaluate(b));
        }

        // next combination
        std::size_t k = pick;
        while (k > 0 && idx[k - 1] == ineq.size() - pick + k - 1) --k;
        if (k == 0) break;
        ++idx[k - 1];
        for (std::size_t j = k; j < pick; ++j) idx[j] = idx[j - 1] + 1;
    }

    if (best == -std::numeric_limits<double>::infinity())
        throw InvalidArgument("program has no basic feasible point");
    return best;
}

} // namespace qlip
