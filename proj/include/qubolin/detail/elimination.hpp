#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qubolin/matrix.hpp"

namespace qubolin::detail {

/// LU factorization with partial pivoting. A pivot is rejected when it falls
/// below rel_pivot_tol times the largest |entry| of the input matrix.
class LuFactors {
public:
    LuFactors(DenseMatrix a, double rel_pivot_tol) : lu_(std::move(a)) {
        if (!lu_.square()) throw std::invalid_argument("LuFactors: matrix must be square");
        const std::size_t n = lu_.rows();
        perm_.resize(n);
        std::iota(perm_.begin(), perm_.end(), std::size_t{0});
        const double scale = max_abs(lu_);
        pivot_floor_ = rel_pivot_tol * scale;
        min_pivot_ = scale;

        for (std::size_t col = 0; col < n; ++col) {
            std::size_t best = col;
            double best_abs = std::abs(lu_(col, col));
            for (std::size_t r = col + 1; r < n; ++r) {
                const double v = std::abs(lu_(r, col));
                if (v > best_abs) {
                    best_abs = v;
                    best = r;
                }
            }
            if (best_abs <= pivot_floor_)
                throw std::runtime_error("LuFactors: matrix is numerically singular (pivot " +
                                         std::to_string(best_abs) + " at column " +
                                         std::to_string(col) + ")");
            if (best != col) {
                for (std::size_t j = 0; j < n; ++j) std::swap(lu_(col, j), lu_(best, j));
                std::swap(perm_[col], perm_[best]);
            }
            min_pivot_ = std::min(min_pivot_, best_abs);
            const double inv = 1.0 / lu_(col, col);
            for (std::size_t r = col + 1; r < n; ++r) {
                const double factor = lu_(r, col) * inv;
                lu_(r, col) = factor;
                if (factor == 0.0) continue;
                for (std::size_t j = col + 1; j < n; ++j) lu_(r, j) -= factor * lu_(col, j);
            }
        }
    }

    Vector solve(const Vector& b) const {
        const std::size_t n = lu_.rows();
        if (b.size() != n) throw std::invalid_argument("LuFactors::solve: rhs length mismatch");
        Vector y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = b[perm_[i]];
            for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * y[j];
            y[i] = s;
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = y[i];
            for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * y[j];
            y[i] = s / lu_(i, i);
        }
        return y;
    }

    double min_pivot() const { return min_pivot_; }

private:
    DenseMatrix lu_;
    std::vector<std::size_t> perm_;
    double pivot_floor_ = 0.0;
    double min_pivot_ = 0.0;
};

inline constexpr double kDefaultPivotTol = 1e-10;

/// Solve A·x = b by pivoted elimination. Internal machinery for basis
/// construction and coefficient extraction; the public solvers of this
/// library are the QUBO-based ones.
inline Vector solve_dense(const DenseMatrix& a, const Vector& b,
                          double rel_pivot_tol = kDefaultPivotTol) {
    return LuFactors(a, rel_pivot_tol).solve(b);
}

/// True when pivoted elimination completes with every pivot above
/// rel_tol · max|A|.
inline bool is_numerically_nonsingular(const DenseMatrix& a, double rel_tol = kDefaultPivotTol) {
    try {
        LuFactors lu(a, rel_tol);
        return true;
    } catch (const std::runtime_error&) {
        return false;
    }
}

}  // namespace qubolin::detail
