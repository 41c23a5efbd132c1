#include "qlip/numlin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qlip/error.hpp"

namespace qlip {

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), data_(std::move(entries)) {
    if (data_.size() != dim_ * dim_)
        throw DimensionMismatch("matrix of dim " + std::to_string(dim_) + " given " +
                                std::to_string(data_.size()) + " entries");
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
    ComplexMatrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::initializer_list<double> diag) {
    return diagonal(std::span<const double>(diag.begin(), diag.size()));
}

ComplexMatrix ComplexMatrix::unit(std::size_t dim, std::size_t row, std::size_t col) {
    if (row >= dim || col >= dim) throw DimensionMismatch("matrix unit index out of range");
    ComplexMatrix m(dim);
    m(row, col) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::from_rows(
    std::initializer_list<std::initializer_list<Complex>> rows) {
    ComplexMatrix m(rows.size());
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != rows.size()) throw DimensionMismatch("matrix rows must be square");
        std::size_t j = 0;
        for (const auto& v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

ComplexMatrix ComplexMatrix::from_parts(const std::vector<std::vector<double>>& re,
                                        const std::vector<std::vector<double>>& im) {
    const std::size_t n = re.size();
    if (im.size() != n) throw DimensionMismatch("re and im have different row counts");
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (re[i].size() != n || im[i].size() != n)
            throw DimensionMismatch("row " + std::to_string(i) + " is not of length " +
                                    std::to_string(n));
        for (std::size_t j = 0; j < n; ++j) m(i, j) = Complex(re[i][j], im[i][j]);
    }
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix r(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

Complex ComplexMatrix::trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
}

double ComplexMatrix::hermiticity_defect() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = i; j < dim_; ++j)
            worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return worst;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
    if (o.dim_ != dim_) throw DimensionMismatch("matrix sum of different dims");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
    if (o.dim_ != dim_) throw DimensionMismatch("matrix difference of different dims");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
    for (auto& v : data_) v *= s;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim_ != b.dim_) throw DimensionMismatch("matrix product of different dims");
    const std::size_t n = a.dim_;
    ComplexMatrix r(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex(0.0)) continue;
            for (std::size_t j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

ComplexMatrix operator-(ComplexMatrix a) {
    for (auto& v : a.data_) v = -v;
    return a;
}

Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("trace pairing of different dims");
    Complex t = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t k = 0; k < a.dim(); ++k) t += a(i, k) * b(k, i);
    return t;
}

// ---------------------------------------------------------------------------

HermitianElement::HermitianElement(ComplexMatrix m) {
    const double defect = m.hermiticity_defect();
    if (defect > kSymmetryTol)
        throw NonHermitianInput("matrix is not hermitian (max |m_ij - conj(m_ji)| = " +
                                std::to_string(defect) + ")");
    m_ = hermitian_part(m).m_;
}

HermitianElement HermitianElement::hermitian_part(const ComplexMatrix& m) {
    ComplexMatrix h(m.dim());
    for (std::size_t i = 0; i < m.dim(); ++i) {
        h(i, i) = m(i, i).real();
        for (std::size_t j = i + 1; j < m.dim(); ++j) {
            const Complex v = 0.5 * (m(i, j) + std::conj(m(j, i)));
            h(i, j) = v;
            h(j, i) = std::conj(v);
        }
    }
    return HermitianElement(std::move(h), Unchecked{});
}

HermitianElement HermitianElement::diagonal(std::span<const double> diag) {
    return HermitianElement(ComplexMatrix::diagonal(diag), Unchecked{});
}

HermitianElement HermitianElement::diagonal(std::initializer_list<double> diag) {
    return HermitianElement(ComplexMatrix::diagonal(diag), Unchecked{});
}

HermitianElement HermitianElement::identity(std::size_t dim) {
    return HermitianElement(ComplexMatrix::identity(dim), Unchecked{});
}

HermitianElement& HermitianElement::operator+=(const HermitianElement& o) {
    m_ += o.m_;
    return *this;
}

HermitianElement& HermitianElement::operator-=(const HermitianElement& o) {
    m_ -= o.m_;
    return *this;
}

HermitianElement& HermitianElement::operator*=(double s) {
    m_ *= s;
    return *this;
}

// ---------------------------------------------------------------------------

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

// One complex Jacobi rotation annihilating a(p, q). The rotation is the phase
// change diag(1, e^{-i phi}) on (p, q) followed by the real symmetric Jacobi
// rotation of the resulting real 2x2 block.
void rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
    const Complex apq = a(p, q);
    const double r = std::abs(apq);
    if (r == 0.0) return;
    const Complex phase = apq / r; // e^{i phi}
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();
    const double theta = (aqq - app) / (2.0 * r);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;

    // U restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
    const Complex upp = c;
    const Complex upq = s;
    const Complex uqp = -s * std::conj(phase);
    const Complex uqq = c * std::conj(phase);

    const std::size_t n = a.dim();
    for (std::size_t k = 0; k < n; ++k) { // a <- a U
        const Complex akp = a(k, p), akq = a(k, q);
        a(k, p) = akp * upp + akq * uqp;
        a(k, q) = akp * upq + akq * uqq;
    }
    for (std::size_t k = 0; k < n; ++k) { // a <- U* a
        const Complex apk = a(p, k), aqk = a(q, k);
        a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
        a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
    }
    for (std::size_t k = 0; k < n; ++k) { // v <- v U
        const Complex vkp = v(k, p), vkq = v(k, q);
        v(k, p) = vkp * upp + vkq * uqp;
        v(k, q) = vkp * upq + vkq * uqq;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = app - t * r;
    a(q, q) = aqq + t * r;
}

} // namespace

EigenDecomposition hermitian_eig(const HermitianElement& m, const JacobiOptions& opts) {
    const std::size_t n = m.dim();
    ComplexMatrix a = m.matrix();
    ComplexMatrix v = ComplexMatrix::identity(n);

    const double threshold = opts.off_tol * std::max(1.0, a.frobenius_norm());
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        if (off_diagonal_norm(a) <= threshold) break;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a(i, i).real() < a(j, j).real();
    });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
    }
    return out;
}

HermitianElement apply_spectral(const EigenDecomposition& eig,
                                const std::function<double(double)>& f) {
    const std::size_t n = eig.eigenvalues.size();
    const ComplexMatrix& v = eig.eigenvectors;
    std::vector<double> fl(n);
    for (std::size_t k = 0; k < n; ++k) fl[k] = f(eig.eigenvalues[k]);
    ComplexMatrix r(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Complex s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += v(i, k) * fl[k] * std::conj(v(j, k));
            r(i, j) = s;
        }
    return HermitianElement::hermitian_part(r);
}

HermitianElement functional_calculus(const HermitianElement& m,
                                     const std::function<double(double)>& f) {
    return apply_spectral(hermitian_eig(m), f);
}

double operator_norm(const HermitianElement& m) {
    if (m.dim() == 0) return 0.0;
    const auto eig = hermitian_eig(m);
    return std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
}

double operator_norm(const ComplexMatrix& m) {
    if (m.dim() == 0) return 0.0;
    if (m.hermiticity_defect() == 0.0) return operator_norm(HermitianElement::hermitian_part(m));
    const auto gram = HermitianElement::hermitian_part(m.adjoint() * m);
    const auto eig = hermitian_eig(gram);
    return std::sqrt(std::max(0.0, eig.eigenvalues.back()));
}

HermitianElement clip_spectral(const HermitianElement& m, double r) {
    if (!(r > 0.0)) throw InvalidArgument("clip_spectral radius must be positive");
    const auto eig = hermitian_eig(m);
    if (eig.eigenvalues.empty() ||
        (eig.eigenvalues.front() >= -r && eig.eigenvalues.back() <= r))
        return m;
    return apply_spectral(eig, [r](double x) { return std::clamp(x, -r, r); });
}

double min_eigenvalue(const HermitianElement& m) {
    if (m.dim() == 0) throw DimensionMismatch("empty matrix has no eigenvalues");
    return hermitian_eig(m).eigenvalues.front();
}

} // namespace qlip
