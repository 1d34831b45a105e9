#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bsdist {

// Small dense row-major matrix; the library never needs p beyond single digits.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline std::vector<double> operator*(const Matrix& a, const std::vector<double>& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matrix-vector product: shape mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
inline Matrix cholesky(const Matrix& g) {
    if (g.rows() != g.cols()) throw std::invalid_argument("cholesky: matrix not square");
    const std::size_t n = g.rows();
    Matrix L(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = g(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (!(d > 0.0)) throw std::domain_error("cholesky: matrix not positive definite");
        L(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = g(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = s / L(j, j);
        }
    }
    return L;
}

// Solves A x = b for symmetric positive-definite A via Cholesky.
inline std::vector<double> solve_spd(const Matrix& a, const std::vector<double>& b) {
    const Matrix L = cholesky(a);
    const std::size_t n = L.rows();
    std::vector<double> y(b);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) y[i] -= L(i, k) * y[k];
        y[i] /= L(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t k = ii + 1; k < n; ++k) y[ii] -= L(k, ii) * y[k];
        y[ii] /= L(ii, ii);
    }
    return y;
}

inline Matrix inverse_spd(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        const auto col = solve_spd(a, e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

inline double log_det_spd(const Matrix& a) {
    const Matrix L = cholesky(a);
    double s = 0.0;
    for (std::size_t i = 0; i < L.rows(); ++i) s += std::log(L(i, i));
    return 2.0 * s;
}

// General (small) linear solve with partial pivoting, for 2x2..5x5 systems
// arising from possibly non-symmetric Jacobians.
inline std::vector<double> solve_general(Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw std::invalid_argument("solve_general: shape mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(a(i, k)) > std::fabs(a(piv, k))) piv = i;
        if (a(piv, k) == 0.0) throw std::runtime_error("solve_general: singular matrix");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = a(i, k) / a(k, k);
            if (m == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) a(i, j) -= m * a(k, j);
            b[i] -= m * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * x[j];
        x[ii] = s / a(ii, ii);
    }
    return x;
}

}  // namespace bsdist
