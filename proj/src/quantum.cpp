#include "qlip/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <type_traits>
#include <numbers>
#include <string>

namespace qlip {

namespace {

const Complex kI(0.0, 1.0);

// Real coordinates of a hermitian k x k matrix in which the Frobenius inner
// product becomes the Euclidean one: the diagonal, then sqrt(2) Re and
// sqrt(2) Im of each strictly upper entry.
void pack(const ComplexMatrix& h, double* out) {
    const std::size_t k = h.dim();
    for (std::size_t i = 0; i < k; ++i) *out++ = h(i, i).real();
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            *out++ = std::numbers::sqrt2 * h(i, j).real();
            *out++ = std::numbers::sqrt2 * h(i, j).imag();
        }
}

HermitianElement unpack(const double* in, std::size_t k) {
    ComplexMatrix h(k);
    for (std::size_t i = 0; i < k; ++i) h(i, i) = *in++;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            const double re = *in++ / std::numbers::sqrt2;
            const double im = *in++ / std::numbers::sqrt2;
            h(i, j) = Complex(re, im);
            h(j, i) = Complex(re, -im);
        }
    return HermitianElement::hermitian_part(h);
}

std::size_t total_size(const std::vector<std::size_t>& dims) {
    std::size_t s = 0;
    for (auto d : dims) s += d * d;
    return s;
}

std::vector<double> pack_blocks(const std::vector<HermitianElement>& blocks) {
    std::vector<double> out;
    for (const auto& b : blocks) {
        const std::size_t off = out.size();
        out.resize(off + b.dim() * b.dim());
        pack(b.matrix(), out.data() + off);
    }
    return out;
}

std::vector<HermitianElement> unpack_blocks(const std::vector<double>& v,
                                            const std::vector<std::size_t>& dims) {
    std::vector<HermitianElement> out;
    std::size_t off = 0;
    for (auto d : dims) {
        out.push_back(unpack(v.data() + off, d));
        off += d * d;
    }
    return out;
}

// Splitting form of the distance program over the real coordinates x:
//   maximize c.x  subject to  x in prod_b {||.|| <= alpha},  T x in prod_b {||.|| <= beta}.
struct SplitProblem {
    std::vector<std::size_t> var_dims;
    std::vector<std::size_t> out_dims;
    std::vector<double> out_scale; // image block b is constrained to ||.|| <= beta * out_scale[b]
    std::size_t p = 0, q = 0;
    std::vector<double> T; // q x p row-major
    std::vector<double> c;

    std::vector<HermitianElement> image_blocks(const std::vector<HermitianElement>& a) const;

    /// max_b ||(T a)_b|| / out_scale[b]
    double seminorm(const std::vector<HermitianElement>& a) const {
        const auto img = image_blocks(a);
        double s = 0.0;
        for (std::size_t b = 0; b < img.size(); ++b) s = std::max(s, operator_norm(img[b]) / out_scale[b]);
        return s;
    }

    void build_matrix() {
        p = total_size(var_dims);
        q = total_size(out_dims);
        T.assign(q * p, 0.0);
        std::vector<double> e(p, 0.0);
        for (std::size_t col = 0; col < p; ++col) {
            e[col] = 1.0;
            const auto img = pack_blocks(image_blocks(unpack_blocks(e, var_dims)));
            for (std::size_t row = 0; row < q; ++row) T[row * p + col] = img[row];
            e[col] = 0.0;
        }
    }

    std::function<std::vector<HermitianElement>(const std::vector<HermitianElement>&)> map;
};

std::vector<HermitianElement> SplitProblem::image_blocks(const std::vector<HermitianElement>& a) const {
    return map(a);
}

HermitianElement commutator_image(const HermitianElement& D, const HermitianElement& a) {
    // i [D, a] is hermitian and has the same norm as [D, a].
    const auto& d = D.matrix();
    const auto& m = a.matrix();
    return HermitianElement::hermitian_part(kI * (d * m - m * d));
}

SplitProblem commutator_problem(const CommutatorSeminorm& L) {
    SplitProblem sp;
    sp.var_dims = {L.D.dim()};
    sp.out_dims = {L.D.dim()};
    sp.out_scale = {1.0};
    sp.map = [D = L.D](const std::vector<HermitianElement>& a) {
        return std::vector<HermitianElement>{commutator_image(D, a[0])};
    };
    sp.build_matrix();
    return sp;
}

// Image blocks are the differences a(x) - a(y) over pairs x < y, then (when
// with_values) the fiber values themselves. The difference block for (x, y)
// carries scale rho(x, y), so the constraint is on the difference quotient;
// keeping the raw differences in T leaves it with entries +-1.
std::vector<HermitianElement> grid_image(const FiniteMetricSpace& X,
                                         const std::vector<HermitianElement>& a, bool with_values) {
    std::vector<HermitianElement> out;
    const std::size_t n = X.size();
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y) out.push_back(a[x] - a[y]);
    if (with_values) out.insert(out.end(), a.begin(), a.end());
    return out;
}

std::vector<double> grid_scales(const FiniteMetricSpace& X, bool with_values) {
    std::vector<double> out;
    for (std::size_t x = 0; x < X.size(); ++x)
        for (std::size_t y = x + 1; y < X.size(); ++y) out.push_back(X.distance(x, y));
    if (with_values) out.insert(out.end(), X.size(), 1.0);
    return out;
}

SplitProblem grid_problem(const MatrixLipSeminorm& L, bool with_values) {
    SplitProblem sp;
    const std::size_t n = L.base->size();
    sp.var_dims.assign(n, L.fiber_dim);
    sp.out_dims.assign(n * (n - 1) / 2 + (with_values ? n : 0), L.fiber_dim);
    sp.out_scale = grid_scales(*L.base, with_values);
    sp.map = [X = L.base, with_values](const std::vector<HermitianElement>& a) {
        return grid_image(*X, a, with_values);
    };
    sp.build_matrix();
    return sp;
}

void require_grid(const MatrixLipSeminorm& L) {
    if (!L.base) throw InvalidArgument("grid seminorm needs a base space");
    if (L.fiber_dim == 0) throw InvalidArgument("fiber_dim must be positive");
}

std::vector<HermitianElement> diagonal_blocks(const HermitianElement& m, std::size_t n, std::size_t k) {
    std::vector<HermitianElement> out;
    for (std::size_t x = 0; x < n; ++x) {
        ComplexMatrix b(k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) b(i, j) = m.matrix()(x * k + i, x * k + j);
        out.push_back(HermitianElement::hermitian_part(b));
    }
    return out;
}

HermitianElement assemble_block_diagonal(const std::vector<HermitianElement>& blocks) {
    std::size_t dim = 0;
    for (const auto& b : blocks) dim += b.dim();
    ComplexMatrix m(dim);
    std::size_t off = 0;
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < b.dim(); ++i)
            for (std::size_t j = 0; j < b.dim(); ++j) m(off + i, off + j) = b.matrix()(i, j);
        off += b.dim();
    }
    return HermitianElement::hermitian_part(m);
}

double max_block_norm(const std::vector<HermitianElement>& blocks) {
    double s = 0.0;
    for (const auto& b : blocks) s = std::max(s, operator_norm(b));
    return s;
}

// Dense Cholesky factor (lower, row-major) of an SPD matrix.
class Cholesky {
public:
    Cholesky(std::vector<double> a, std::size_t n) : n_(n), l_(std::move(a)) {
        for (std::size_t j = 0; j < n_; ++j) {
            double d = l_[j * n_ + j];
            for (std::size_t k = 0; k < j; ++k) d -= l_[j * n_ + k] * l_[j * n_ + k];
            if (!(d > 0.0)) throw Error("coupling system is not positive definite");
            const double djj = std::sqrt(d);
            l_[j * n_ + j] = djj;
            for (std::size_t i = j + 1; i < n_; ++i) {
                double s = l_[i * n_ + j];
                for (std::size_t k = 0; k < j; ++k) s -= l_[i * n_ + k] * l_[j * n_ + k];
                l_[i * n_ + j] = s / djj;
            }
        }
    }

    void solve(std::vector<double>& b) const {
        for (std::size_t i = 0; i < n_; ++i) {
            double s = b[i];
            for (std::size_t k = 0; k < i; ++k) s -= l_[i * n_ + k] * b[k];
            b[i] = s / l_[i * n_ + i];
        }
        for (std::size_t i = n_; i-- > 0;) {
            double s = b[i];
            for (std::size_t k = i + 1; k < n_; ++k) s -= l_[k * n_ + i] * b[k];
            b[i] = s / l_[i * n_ + i];
        }
    }

private:
    std::size_t n_;
    std::vector<double> l_;
};

// Projects block b of v onto the spectral ball of radius r * scale[b].
void project_blocks(double* v, const std::vector<std::size_t>& dims, double r,
                    const std::vector<double>& scale) {
    for (std::size_t b = 0; b < dims.size(); ++b) {
        const std::size_t d = dims[b];
        const double radius = scale.empty() ? r : r * scale[b];
        if (d == 1) {
            v[0] = std::clamp(v[0], -radius, radius);
        } else {
            pack(clip_spectral(unpack(v, d), radius).matrix(), v);
        }
        v += d * d;
    }
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

struct Certified {
    double value;
    std::vector<HermitianElement> blocks;
    double norm;
    double seminorm;
};

// Feasible point near a: clip into the alpha-ball, then shrink until L <= beta.
Certified certify(const SplitProblem& sp, const std::vector<double>& a, double alpha, double beta) {
    std::vector<double> v = a;
    project_blocks(v.data(), sp.var_dims, alpha, {});
    auto blocks = unpack_blocks(v, sp.var_dims);
    double sem = sp.seminorm(blocks);
    if (sem > beta) {
        const double t = beta / sem;
        for (auto& b : blocks) b *= t;
        for (auto& x : v) x *= t;
        sem = sp.seminorm(blocks);
    }
    double value = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) value += sp.c[i] * v[i];
    return {value, std::move(blocks), max_block_norm(unpack_blocks(v, sp.var_dims)), sem};
}

MatrixDistanceResult run_splitting(const SplitProblem& sp, double alpha, double beta,
                                   const SolverConfig& cfg) {
    const std::size_t p = sp.p, q = sp.q;

    std::vector<double> gram(p * p, 0.0); // I + T^T T
    for (std::size_t i = 0; i < p; ++i) gram[i * p + i] = 1.0;
    for (std::size_t r = 0; r < q; ++r) {
        const double* row = &sp.T[r * p];
        for (std::size_t i = 0; i < p; ++i) {
            if (row[i] == 0.0) continue;
            for (std::size_t j = 0; j < p; ++j) gram[i * p + j] += row[i] * row[j];
        }
    }
    const Cholesky chol(std::move(gram), p);

    auto apply_T = [&](const std::vector<double>& x, double* out) {
        for (std::size_t r = 0; r < q; ++r) {
            double s = 0.0;
            for (std::size_t j = 0; j < p; ++j) s += sp.T[r * p + j] * x[j];
            out[r] = s;
        }
    };
    auto apply_Tt_add = [&](const double* y, std::vector<double>& out) {
        for (std::size_t r = 0; r < q; ++r) {
            if (y[r] == 0.0) continue;
            for (std::size_t j = 0; j < p; ++j) out[j] += sp.T[r * p + j] * y[r];
        }
    };

    std::vector<double> x(p, 0.0), z(p + q, 0.0), u(p + q, 0.0), ax(p + q), ah(p + q), zold(p + q), rhs(p);
    double rho = cfg.penalty;

    MatrixDistanceResult out;
    Certified best = certify(sp, x, alpha, beta);
    auto record = [&](std::int64_t it, double r, double s) {
        out.log.push_back({it, best.value, r, s, rho});
    };

    constexpr double kRelax = 1.6;
    constexpr std::int64_t kCertifyEvery = 10;
    constexpr std::int64_t kRebalanceEvery = 25;
    constexpr std::int64_t kRebalanceUntil = 2000;
    bool converged = false;
    double r = 0.0, s = 0.0;
    std::int64_t it = 0;
    while (it < cfg.max_iters) {
        ++it;
        // x-update: (I + T^T T) x = (z1 - u1) + T^T (z2 - u2) + c / rho
        for (std::size_t j = 0; j < p; ++j) rhs[j] = z[j] - u[j] + sp.c[j] / rho;
        {
            std::vector<double> w(q);
            for (std::size_t k = 0; k < q; ++k) w[k] = z[p + k] - u[p + k];
            apply_Tt_add(w.data(), rhs);
        }
        x = rhs;
        chol.solve(x);

        std::copy(x.begin(), x.end(), ax.begin());
        apply_T(x, ax.data() + p);

        // Over-relaxed coupling: ah = theta A x + (1 - theta) z.
        zold = z;
        for (std::size_t k = 0; k < p + q; ++k) ah[k] = kRelax * ax[k] + (1.0 - kRelax) * zold[k];
        for (std::size_t k = 0; k < p + q; ++k) z[k] = ah[k] + u[k];
        project_blocks(z.data(), sp.var_dims, alpha, {});
        project_blocks(z.data() + p, sp.out_dims, beta, sp.out_scale);
        for (std::size_t k = 0; k < p + q; ++k) u[k] += ah[k] - z[k];

        double rr = 0.0;
        for (std::size_t k = 0; k < p + q; ++k) rr += (ax[k] - z[k]) * (ax[k] - z[k]);
        r = std::sqrt(rr);
        std::vector<double> dz(p);
        for (std::size_t j = 0; j < p; ++j) dz[j] = z[j] - zold[j];
        {
            std::vector<double> w(q);
            for (std::size_t k = 0; k < q; ++k) w[k] = z[p + k] - zold[p + k];
            apply_Tt_add(w.data(), dz);
        }
        s = rho * norm2(dz);

        converged = r < cfg.tol && s < cfg.tol;
        if (converged || it % kCertifyEvery == 0) {
            auto cand = certify(sp, std::vector<double>(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(p)),
                                alpha, beta);
            if (cand.value > best.value) best = std::move(cand);
            record(it, r, s);
        }
        if (converged) break;

        // Residual balancing; u is the scaled dual so it rescales with rho.
        // The penalty is frozen after a fixed budget so the tail of the run is
        // plain ADMM, which converges for any fixed penalty.
        if (it % kRebalanceEvery != 0 || it > kRebalanceUntil) continue;
        if (r > 10.0 * s) {
            rho *= 2.0;
            for (auto& v : u) v *= 0.5;
        } else if (s > 10.0 * r) {
            rho *= 0.5;
            for (auto& v : u) v *= 2.0;
        }
    }

    out.value = best.value;
    out.iters = it;
    out.primal_res = r;
    out.dual_res = s;
    out.norm_slack = alpha - best.norm;
    out.seminorm_slack = beta - best.seminorm;
    out.witness = assemble_block_diagonal(best.blocks);
    if (!converged)
        throw SolverStalled("splitting solver stopped after " + std::to_string(it) +
                                " iterations with residuals (" + std::to_string(r) + ", " +
                                std::to_string(s) + ") above tol " + std::to_string(cfg.tol),
                            std::move(out));
    return out;
}

// Real matrix whose columns are the packed images of the basis elements.
NullSpaceReport null_space(const std::vector<std::vector<double>>& images,
                           const std::vector<HermitianElement>& elements) {
    const std::size_t m = images.size();
    NullSpaceReport rep;
    if (m == 0) return rep;
    ComplexMatrix gram(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < images[i].size(); ++k) s += images[i][k] * images[j][k];
            gram(i, j) = s;
        }
    const auto eig = hermitian_eig(HermitianElement::hermitian_part(gram));
    const double scale = std::max(1.0, std::abs(eig.eigenvalues.back()));
    const std::size_t dim = elements.front().dim();
    for (std::size_t k = 0; k < m; ++k) {
        if (eig.eigenvalues[k] > 1e-10 * scale) continue;
        ComplexMatrix e(dim);
        for (std::size_t i = 0; i < m; ++i) e += elements[i].matrix() * Complex(eig.eigenvectors(i, k).real());
        rep.null_basis.push_back(HermitianElement::hermitian_part(e));
    }
    rep.nullity = rep.null_basis.size();
    if (rep.nullity == 1) {
        // Scalars iff the null element is proportional to the identity.
        const auto& e = rep.null_basis.front().matrix();
        const Complex t = e.trace() / static_cast<double>(dim);
        const auto residual = e - ComplexMatrix::identity(dim) * t;
        rep.scalars_only = std::abs(t) > 1e-12 && residual.frobenius_norm() <= 1e-8 * e.frobenius_norm();
    }
    return rep;
}

} // namespace

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(HermitianElement m) : m_(std::move(m)) {
    if (m_.dim() == 0) throw InvalidState("density matrix must be nonempty");
    const double tr = m_.matrix().trace().real();
    if (std::abs(tr - 1.0) > kTol) throw InvalidState("density matrix trace is " + std::to_string(tr));
    const double lo = min_eigenvalue(m_);
    if (lo < -kTol) throw InvalidState("density matrix has eigenvalue " + std::to_string(lo));
}

DensityMatrix DensityMatrix::basis_state(std::size_t dim, std::size_t i) {
    return DensityMatrix(HermitianElement(ComplexMatrix::unit(dim, i, i)));
}

DensityMatrix DensityMatrix::from_blocks(const std::vector<HermitianElement>& blocks) {
    return DensityMatrix(assemble_block_diagonal(blocks));
}

void MatrixGridElement::validate(std::size_t fiber_dim) const {
    if (!space) throw DimensionMismatch("grid element needs a space");
    if (fibers.size() != space->size())
        throw DimensionMismatch("grid element has " + std::to_string(fibers.size()) + " fibers for " +
                                std::to_string(space->size()) + " points");
    for (const auto& f : fibers)
        if (f.dim() != fiber_dim) throw DimensionMismatch("fiber dimension differs from seminorm");
}

HermitianElement MatrixGridElement::block_diagonal() const { return assemble_block_diagonal(fibers); }

double grid_lipschitz(const FiniteMetricSpace& space, const std::vector<ComplexMatrix>& fibers) {
    if (fibers.size() != space.size()) throw DimensionMismatch("one fiber per point required");
    double l = 0.0;
    for (std::size_t x = 0; x < fibers.size(); ++x)
        for (std::size_t y = x + 1; y < fibers.size(); ++y)
            l = std::max(l, operator_norm(fibers[x] - fibers[y]) / space.distance(x, y));
    return l;
}

double grid_sup_norm(const std::vector<ComplexMatrix>& fibers) {
    double s = 0.0;
    for (const auto& f : fibers) s = std::max(s, operator_norm(f));
    return s;
}

double seminorm_eval(const CommutatorSeminorm& L, const HermitianElement& a) {
    if (a.dim() != L.D.dim()) throw DimensionMismatch("element and D have different dimensions");
    return operator_norm(commutator_image(L.D, a));
}

namespace {
std::vector<ComplexMatrix> as_matrices(const MatrixGridElement& a) {
    std::vector<ComplexMatrix> out;
    for (const auto& f : a.fibers) out.push_back(f.matrix());
    return out;
}
} // namespace

double lipschitz_part(const MatrixLipSeminorm& L, const MatrixGridElement& a) {
    require_grid(L);
    a.validate(L.fiber_dim);
    if (!(*a.space == *L.base)) throw DimensionMismatch("grid element lives on another space");
    return grid_lipschitz(*L.base, as_matrices(a));
}

double seminorm_eval(const MatrixLipSeminorm& L, const MatrixGridElement& a) {
    return std::max(lipschitz_part(L, a), grid_sup_norm(as_matrices(a)));
}

std::size_t algebra_dim(const Seminorm& L) {
    return std::visit(
        [](const auto& s) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, CommutatorSeminorm>) {
                return s.D.dim();
            } else {
                require_grid(s);
                return s.base->size() * s.fiber_dim;
            }
        },
        L);
}

MatrixDistanceResult bl_distance_matrix(const DensityMatrix& rho1, const DensityMatrix& rho2,
                                        const Seminorm& L, double alpha, double beta,
                                        const SolverConfig& config) {
    config.validate();
    if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidArgument("alpha and beta must be positive");
    const std::size_t dim = algebra_dim(L);
    if (rho1.dim() != dim || rho2.dim() != dim)
        throw DimensionMismatch("density matrices must have dimension " + std::to_string(dim));

    const auto diff = rho1.matrix() - rho2.matrix();
    SplitProblem sp = std::visit(
        [&](const auto& s) -> SplitProblem {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, CommutatorSeminorm>) {
                auto prob = commutator_problem(s);
                prob.c = pack_blocks({diff});
                return prob;
            } else {
                auto prob = grid_problem(s, true);
                prob.c = pack_blocks(diagonal_blocks(diff, s.base->size(), s.fiber_dim));
                return prob;
            }
        },
        L);
    return run_splitting(sp, alpha, beta, config);
}

std::vector<HermitianElement> hermitian_basis(std::size_t dim) {
    std::vector<HermitianElement> out;
    std::vector<double> e(dim * dim, 0.0);
    for (std::size_t k = 0; k < dim * dim; ++k) {
        e[k] = 1.0;
        out.push_back(unpack(e.data(), dim));
        e[k] = 0.0;
    }
    return out;
}

std::vector<MatrixGridElement> grid_basis(const SpacePtr& space, std::size_t fiber_dim) {
    std::vector<MatrixGridElement> out;
    const auto local = hermitian_basis(fiber_dim);
    for (std::size_t x = 0; x < space->size(); ++x)
        for (const auto& b : local) {
            MatrixGridElement g{space, std::vector<HermitianElement>(space->size(),
                                                                     HermitianElement::hermitian_part(
                                                                         ComplexMatrix::zeros(fiber_dim)))};
            g.fibers[x] = b;
            out.push_back(std::move(g));
        }
    return out;
}

NullSpaceReport seminorm_null_check(const CommutatorSeminorm& L,
                                    const std::vector<HermitianElement>& basis) {
    std::vector<std::vector<double>> images;
    for (const auto& b : basis) {
        if (b.dim() != L.D.dim()) throw DimensionMismatch("basis element dimension differs from D");
        images.push_back(pack_blocks({commutator_image(L.D, b)}));
    }
    return null_space(images, basis);
}

NullSpaceReport seminorm_null_check(const MatrixLipSeminorm& L,
                                    const std::vector<MatrixGridElement>& basis) {
    require_grid(L);
    std::vector<std::vector<double>> images;
    std::vector<HermitianElement> elements;
    for (const auto& b : basis) {
        b.validate(L.fiber_dim);
        images.push_back(pack_blocks(grid_image(*L.base, b.fibers, false)));
        elements.push_back(b.block_diagonal());
    }
    return null_space(images, elements);
}

DiameterScan diameter_scan(const std::vector<DensityMatrix>& states, const Seminorm& L, double alpha,
                           double beta, const SolverConfig& config) {
    if (states.size() < 2) throw InvalidArgument("diameter scan needs at least two states");
    DiameterScan out;
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t j = i + 1; j < states.size(); ++j) {
            const double d = bl_distance_matrix(states[i], states[j], L, alpha, beta, config).value;
            if (d > out.diameter) {
                out.diameter = d;
                out.first = i;
                out.second = j;
            }
        }
    return out;
}

} // namespace qlip
