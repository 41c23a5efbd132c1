#pragma once

// Dense complex linear algebra kernels: hermitian eigendecomposition by
// cyclic Jacobi rotations, operator norms and spectral-ball projections.

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace qlip {

using Complex = std::complex<double>;

/// Square complex matrix stored row-major.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t dim);
    ComplexMatrix(std::size_t dim, std::vector<Complex> entries);

    static ComplexMatrix zeros(std::size_t dim) { return ComplexMatrix(dim); }
    static ComplexMatrix identity(std::size_t dim);
    static ComplexMatrix diagonal(std::span<const double> diag);
    static ComplexMatrix diagonal(std::initializer_list<double> diag);
    /// Rank-one operator |e_row><e_col|, i.e. the matrix unit E_{row,col}.
    static ComplexMatrix unit(std::size_t dim, std::size_t row, std::size_t col);
    static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);
    static ComplexMatrix from_parts(const std::vector<std::vector<double>>& re,
                                    const std::vector<std::vector<double>>& im);

    std::size_t dim() const noexcept { return dim_; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

    std::span<const Complex> entries() const noexcept { return data_; }

    ComplexMatrix adjoint() const;
    Complex trace() const;
    double frobenius_norm() const;
    /// max_ij |m_ij - m_ji^*|
    double hermiticity_defect() const;

    ComplexMatrix& operator+=(const ComplexMatrix& o);
    ComplexMatrix& operator-=(const ComplexMatrix& o);
    ComplexMatrix& operator*=(Complex s);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
    friend ComplexMatrix operator-(ComplexMatrix a);

    bool operator==(const ComplexMatrix&) const = default;

private:
    std::size_t dim_ = 0;
    std::vector<Complex> data_;
};

/// Trace of a*b without forming the product.
Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// A self-adjoint matrix. Construction validates symmetry within 1e-12 per
/// entry and then stores the exact hermitian part.
class HermitianElement {
public:
    static constexpr double kSymmetryTol = 1e-12;

    HermitianElement() = default;
    explicit HermitianElement(ComplexMatrix m);

    /// (m + m*) / 2 with no validation.
    static HermitianElement hermitian_part(const ComplexMatrix& m);
    static HermitianElement diagonal(std::span<const double> diag);
    static HermitianElement diagonal(std::initializer_list<double> diag);
    static HermitianElement identity(std::size_t dim);

    std::size_t dim() const noexcept { return m_.dim(); }
    const ComplexMatrix& matrix() const noexcept { return m_; }
    operator const ComplexMatrix&() const noexcept { return m_; }

    HermitianElement& operator+=(const HermitianElement& o);
    HermitianElement& operator-=(const HermitianElement& o);
    HermitianElement& operator*=(double s);
    friend HermitianElement operator+(HermitianElement a, const HermitianElement& b) { return a += b; }
    friend HermitianElement operator-(HermitianElement a, const HermitianElement& b) { return a -= b; }
    friend HermitianElement operator*(HermitianElement a, double s) { return a *= s; }
    friend HermitianElement operator*(double s, HermitianElement a) { return a *= s; }

    bool operator==(const HermitianElement&) const = default;

private:
    struct Unchecked {};
    HermitianElement(ComplexMatrix m, Unchecked) : m_(std::move(m)) {}
    ComplexMatrix m_;
};

struct EigenDecomposition {
    std::vector<double> eigenvalues; // ascending
    ComplexMatrix eigenvectors;      // columns, unitary
};

struct JacobiOptions {
    double off_tol = 1e-14; // relative to the Frobenius norm of the input
    int max_sweeps = 100;
};

EigenDecomposition hermitian_eig(const HermitianElement& m, const JacobiOptions& opts = {});

/// V diag(f(lambda)) V*.
HermitianElement apply_spectral(const EigenDecomposition& eig,
                                const std::function<double(double)>& f);
HermitianElement functional_calculus(const HermitianElement& m,
                                     const std::function<double(double)>& f);

/// Largest singular value.
double operator_norm(const ComplexMatrix& m);
double operator_norm(const HermitianElement& m);

/// Frobenius-nearest hermitian matrix with operator norm <= r.
HermitianElement clip_spectral(const HermitianElement& m, double r);

double min_eigenvalue(const HermitianElement& m);

} // namespace qlip
