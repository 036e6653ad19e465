#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qubolin {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }
    bool square() const { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    /// Pointer to the start of row i.
    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline bool all_finite(const Vector& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline bool all_finite(const DenseMatrix& m) { return all_finite(m.data()); }

inline double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2_sq(const Vector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

inline double max_abs(const Vector& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double max_abs(const DenseMatrix& m) { return max_abs(m.data()); }

/// y = M x.
inline Vector matvec(const DenseMatrix& m, const Vector& x) {
    if (m.cols() != x.size()) throw std::invalid_argument("matvec: shape mismatch");
    Vector y(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* r = m.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += r[j] * x[j];
        y[i] = s;
    }
    return y;
}

/// y = Mᵀ x.
inline Vector matvec_transposed(const DenseMatrix& m, const Vector& x) {
    if (m.rows() != x.size()) throw std::invalid_argument("matvec_transposed: shape mismatch");
    Vector y(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* r = m.row(i);
        const double xi = x[i];
        for (std::size_t j = 0; j < m.cols(); ++j) y[j] += r[j] * xi;
    }
    return y;
}

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
    DenseMatrix c(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ra = a.row(i);
        double* rc = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = ra[k];
            if (aik == 0.0) continue;
            const double* rb = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) rc[j] += aik * rb[j];
        }
    }
    return c;
}

inline DenseMatrix transpose(const DenseMatrix& m) {
    DenseMatrix t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
    return t;
}

/// The pair (A, b) of a square linear system A·x = b.
struct LinearSystem {
    DenseMatrix a;
    Vector b;

    LinearSystem(DenseMatrix a_in, Vector b_in) : a(std::move(a_in)), b(std::move(b_in)) {
        if (!a.square()) throw std::invalid_argument("LinearSystem: A must be square");
        if (a.rows() != b.size())
            throw std::invalid_argument("LinearSystem: A row count must equal b length");
        if (!all_finite(a) || !all_finite(b))
            throw std::invalid_argument("LinearSystem: entries must be finite");
    }

    std::size_t size() const { return b.size(); }
};

/// ‖A·x − b‖², the residual functional minimized by every solver here.
inline double residual_norm_sq(const LinearSystem& sys, const Vector& x) {
    if (x.size() != sys.size())
        throw std::invalid_argument("residual_norm_sq: x length mismatch");
    double f = 0.0;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        const double* r = sys.a.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < sys.size(); ++j) s += r[j] * x[j];
        const double d = s - sys.b[i];
        f += d * d;
    }
    return f;
}

/// H = AᵀA. Upper triangle is computed and mirrored, so the result is
/// symmetric exactly (H(i,j) == H(j,i) bit for bit).
inline DenseMatrix gram_matrix(const DenseMatrix& a) {
    if (!a.square()) throw std::invalid_argument("gram_matrix: A must be square");
    const std::size_t n = a.rows();
    DenseMatrix h(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += a(k, i) * a(k, j);
            h(i, j) = s;
            h(j, i) = s;
        }
    }
    return h;
}

}  // namespace qubolin
