#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qubolin/detail/elimination.hpp"
#include "qubolin/matrix.hpp"

namespace qubolin {

#ifdef QUBOLIN_INSTRUMENT_FLOPS
namespace detail {
// Multiply-add counter for the O(N³) cost-ceiling test. Only compiled into
// instrumented test binaries.
inline thread_local std::uint64_t conjugate_basis_flops = 0;
}  // namespace detail
#define QUBOLIN_COUNT_FLOPS(n) (::qubolin::detail::conjugate_basis_flops += (n))
#else
#define QUBOLIN_COUNT_FLOPS(n) ((void)0)
#endif

/// ⟨v, w⟩_H = vᵀ·(H·w), the inner product whose orthogonality notion aligns
/// with the level ellipsoids of ‖A·x − b‖² when H = AᵀA.
inline double h_inner(const DenseMatrix& h, const Vector& v, const Vector& w) {
    if (!h.square() || h.rows() != v.size() || h.rows() != w.size())
        throw std::invalid_argument("h_inner: shape mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double* row = h.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) s += row[j] * w[j];
        total += v[i] * s;
    }
    return total;
}

/// Rows v_k of V are unit Euclidean vectors with V·H·Vᵀ diagonal;
/// c_k = ⟨v_k, v_k⟩_H > 0 are the diagonal energies.
struct ConjugateBasis {
    DenseMatrix v;
    Vector c;
};

/// Gram-Schmidt H-orthogonalization of the canonical basis:
///   v_1 = u_1,   v_m = normalize(u_m + Σ_{k<m} β_mk·v_k),
///   β_mk = −⟨v_k, u_m⟩_H / ⟨v_k, v_k⟩_H.
/// Every row is normalized (v_1 = u_1 is already unit, so behavior is
/// uniform). Raises a singular-geometry error when some ⟨v_k, v_k⟩_H falls
/// to 1e-12·max|H| or below, i.e. A is effectively rank-deficient.
inline ConjugateBasis conjugate_basis(const DenseMatrix& a) {
    if (!a.square()) throw std::invalid_argument("conjugate_basis: A must be square");
    const std::size_t n = a.rows();
    const DenseMatrix h = gram_matrix(a);
    const double energy_floor = 1e-12 * max_abs(h);

    ConjugateBasis basis;
    basis.v = DenseMatrix(n, n, 0.0);
    basis.c.assign(n, 0.0);
    // Row k of `images` is H·v_k; β_mk = −(H·v_k)[m]/c_k needs only one
    // element of it per target row.
    DenseMatrix images(n, n, 0.0);

    Vector work(n);
    for (std::size_t m = 0; m < n; ++m) {
        std::fill(work.begin(), work.end(), 0.0);
        work[m] = 1.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double beta = -images(k, m) / basis.c[k];
            QUBOLIN_COUNT_FLOPS(n + 1);
            const double* vk = basis.v.row(k);
            for (std::size_t j = 0; j < n; ++j) work[j] += beta * vk[j];
        }
        double norm_sq = 0.0;
        for (double x : work) norm_sq += x * x;
        QUBOLIN_COUNT_FLOPS(n);
        const double norm = std::sqrt(norm_sq);
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw std::runtime_error("conjugate_basis: degenerate direction at row " +
                                     std::to_string(m + 1));
        for (std::size_t j = 0; j < n; ++j) basis.v(m, j) = work[j] / norm;

        double energy_m = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* hrow = h.row(i);
            const double* vm = basis.v.row(m);
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += hrow[j] * vm[j];
            images(m, i) = s;
            energy_m += vm[i] * s;
        }
        QUBOLIN_COUNT_FLOPS(n * n + n);
        if (energy_m <= energy_floor)
            throw std::runtime_error(
                "conjugate_basis: singular geometry, H-energy of direction " +
                std::to_string(m + 1) + " is " + std::to_string(energy_m));
        basis.c[m] = energy_m;
    }
    return basis;
}

/// Partial H-orthogonalization: rows of V grouped by `composition` so that
/// V·H·Vᵀ = H_{a_1} ⊕ … ⊕ H_{a_m}. Rows are not mutually H-orthogonal
/// inside a group; groups are.
struct BlockBasis {
    DenseMatrix v;
    std::vector<std::size_t> composition;
    std::vector<DenseMatrix> blocks;
};

/// Stage-wise block H-orthogonalization. Stage k eliminates the coupling of
/// all trailing rows to the k-th pivot block by solving
/// β_j = −H_{a_k}⁻¹·h_j (pivoted elimination rather than an explicit
/// inverse) and accumulates V ← S_k·V.
///
/// Stage-local row normalization (as in the stage description) rescales but
/// never redirects later rows, so the composed rows are normalized once at
/// the end; with the all-ones composition this reproduces conjugate_basis
/// up to roundoff. The stored blocks are read off a fresh, symmetrized
/// V·H·Vᵀ.
inline BlockBasis block_conjugate_basis(const DenseMatrix& a,
                                        const std::vector<std::size_t>& composition) {
    if (!a.square()) throw std::invalid_argument("block_conjugate_basis: A must be square");
    const std::size_t n = a.rows();
    if (composition.empty())
        throw std::invalid_argument("block_conjugate_basis: empty composition");
    std::size_t total = 0;
    for (std::size_t c : composition) {
        if (c < 1) throw std::invalid_argument("block_conjugate_basis: composition entries must be >= 1");
        total += c;
    }
    if (total != n)
        throw std::invalid_argument("block_conjugate_basis: composition must sum to N");

    const DenseMatrix h = gram_matrix(a);
    DenseMatrix h_work = h;
    DenseMatrix v = DenseMatrix::identity(n);
    const std::size_t stages = composition.size() - 1;

    std::size_t offset = 0;
    for (std::size_t stage = 0; stage < stages; ++stage) {
        const std::size_t width = composition[stage];
        const std::size_t tail = offset + width;  // first row not yet pinned

        DenseMatrix pivot_block(width, width);
        for (std::size_t i = 0; i < width; ++i)
            for (std::size_t j = 0; j < width; ++j)
                pivot_block(i, j) = h_work(offset + i, offset + j);

        std::vector<double> inv_norm(n - tail);
        DenseMatrix betas(n - tail, width);
        try {
            detail::LuFactors lu(std::move(pivot_block), detail::kDefaultPivotTol);
            Vector rhs(width);
            for (std::size_t j = tail; j < n; ++j) {
                for (std::size_t i = 0; i < width; ++i) rhs[i] = h_work(offset + i, j);
                Vector beta = lu.solve(rhs);
                double norm_sq = 1.0;  // the u_j component
                for (std::size_t i = 0; i < width; ++i) {
                    beta[i] = -beta[i];
                    betas(j - tail, i) = beta[i];
                    norm_sq += beta[i] * beta[i];
                }
                inv_norm[j - tail] = 1.0 / std::sqrt(norm_sq);
            }
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("block_conjugate_basis: decomposition failed, block " +
                                     std::to_string(stage + 1) + " is numerically singular (" +
                                     e.what() + ")");
        }

        // V ← S·V with S = I except rows j ≥ tail: row_j += Σ_l β_jl·row_{offset+l}.
        for (std::size_t j = tail; j < n; ++j) {
            const double* beta = betas.row(j - tail);
            double* vj = v.row(j);
            for (std::size_t l = 0; l < width; ++l) {
                const double* vsrc = v.row(offset + l);
                const double bl = beta[l];
                for (std::size_t col = 0; col < n; ++col) vj[col] += bl * vsrc[col];
            }
            const double s = inv_norm[j - tail];
            for (std::size_t col = 0; col < n; ++col) vj[col] *= s;
        }

        // H ← S·H·Sᵀ, applied column-side then row-side.
        for (std::size_t i = 0; i < n; ++i) {
            double* hi = h_work.row(i);
            for (std::size_t j = tail; j < n; ++j) {
                const double* beta = betas.row(j - tail);
                double s = hi[j];
                for (std::size_t l = 0; l < width; ++l) s += beta[l] * hi[offset + l];
                hi[j] = s * inv_norm[j - tail];
            }
        }
        for (std::size_t j = tail; j < n; ++j) {
            const double* beta = betas.row(j - tail);
            double* hj = h_work.row(j);
            const double s = inv_norm[j - tail];
            for (std::size_t col = 0; col < n; ++col) {
                double acc = hj[col];
                for (std::size_t l = 0; l < width; ++l) acc += beta[l] * h_work(offset + l, col);
                hj[col] = acc * s;
            }
        }

        offset = tail;
    }

    // Final unit normalization; stage scaling cannot change directions.
    for (std::size_t i = 0; i < n; ++i) {
        double* row = v.row(i);
        double norm_sq = 0.0;
        for (std::size_t j = 0; j < n; ++j) norm_sq += row[j] * row[j];
        const double norm = std::sqrt(norm_sq);
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw std::runtime_error("block_conjugate_basis: degenerate row " +
                                     std::to_string(i + 1));
        for (std::size_t j = 0; j < n; ++j) row[j] /= norm;
    }

    DenseMatrix h_v = matmul(matmul(v, h), transpose(v));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = 0.5 * (h_v(i, j) + h_v(j, i));
            h_v(i, j) = s;
            h_v(j, i) = s;
        }

    BlockBasis basis;
    basis.v = std::move(v);
    basis.composition = composition;

    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(h_v(i, i)));
    double max_leak = 0.0;
    std::size_t start = 0;
    for (std::size_t k = 0; k < composition.size(); ++k) {
        const std::size_t width = composition[k];
        DenseMatrix block(width, width);
        for (std::size_t i = 0; i < width; ++i)
            for (std::size_t j = 0; j < width; ++j) block(i, j) = h_v(start + i, start + j);
        basis.blocks.push_back(std::move(block));
        for (std::size_t i = start; i < start + width; ++i)
            for (std::size_t j = start + width; j < n; ++j)
                max_leak = std::max(max_leak, std::abs(h_v(i, j)));
        start += width;
    }
    if (max_leak > 1e-8 * max_diag)
        throw std::runtime_error("block_conjugate_basis: off-block leakage " +
                                 std::to_string(max_leak) + " exceeds tolerance");
    return basis;
}

/// Coefficients D with x = x0 + Σ_j D_j·v_j, i.e. the solution of Vᵀ·D =
/// x − x0 by pivoted elimination. The reconstruction is verified to
/// 1e-9·(1 + ‖x‖).
inline Vector rhombus_coefficients(const DenseMatrix& v, const Vector& x0, const Vector& x) {
    if (!v.square() || v.rows() != x0.size() || v.rows() != x.size())
        throw std::invalid_argument("rhombus_coefficients: shape mismatch");
    const std::size_t n = v.rows();
    Vector rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = x[i] - x0[i];
    Vector d;
    try {
        d = detail::LuFactors(transpose(v), detail::kDefaultPivotTol).solve(rhs);
    } catch (const std::runtime_error&) {
        throw std::runtime_error("rhombus_coefficients: basis matrix is singular");
    }
    Vector rebuilt = matvec_transposed(v, d);
    double err_sq = 0.0, x_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = x0[i] + rebuilt[i] - x[i];
        err_sq += e * e;
        x_sq += x[i] * x[i];
    }
    if (std::sqrt(err_sq) > 1e-9 * (1.0 + std::sqrt(x_sq)))
        throw std::runtime_error("rhombus_coefficients: reconstruction failed (ill-conditioned basis)");
    return d;
}

/// Checks the sub-rhombus convergence property on one instance: among the 2^N
/// corner points y_k = x0 + Σ_j s_j·(l/4)·v_j (bit 1 ↦ s = +1, bit 0 ↦ −1,
/// bit j of the corner index addressing coordinate j), the corner minimizing
/// ‖A·y − b‖² must own the sub-rhombus containing x* = A⁻¹b. Boundary points
/// count as inside (slack 1e-9·l). Requires x* inside the principal rhombus
/// (all |D_j| ≤ l/2); that precondition failing is an error, not `false`.
inline bool verify_subrhombus_property(const LinearSystem& sys, const Vector& x0, double l) {
    const std::size_t n = sys.size();
    if (n > 16)
        throw std::invalid_argument("verify_subrhombus_property: N must be <= 16 for corner enumeration");
    if (!(l > 0.0)) throw std::invalid_argument("verify_subrhombus_property: l must be positive");
    if (x0.size() != n) throw std::invalid_argument("verify_subrhombus_property: x0 length mismatch");

    const ConjugateBasis basis = conjugate_basis(sys.a);
    const Vector x_star = detail::solve_dense(sys.a, sys.b);
    const Vector d = rhombus_coefficients(basis.v, x0, x_star);
    const double slack = 1e-9 * l;
    for (double dj : d)
        if (std::abs(dj) > 0.5 * l + slack)
            throw std::invalid_argument("verify_subrhombus_property: x* outside the rhombus");

    // Appendix chain: |D_j| <= l/2 forces |E_j| = ||D_j| - l/4| <= l/4.
    for (double dj : d)
        if (std::abs(std::abs(dj) - 0.25 * l) > 0.25 * l + slack)
            throw std::runtime_error("verify_subrhombus_property: inequality chain violated");

    const std::uint64_t corners = std::uint64_t{1} << n;
    Vector y(n), best_y(n);
    double best_f = 0.0;
    bool have_best = false;
    for (std::uint64_t k = 0; k < corners; ++k) {
        y = x0;
        for (std::size_t j = 0; j < n; ++j) {
            const double s = ((k >> j) & 1) ? 1.0 : -1.0;
            const double* vj = basis.v.row(j);
            const double step = s * 0.25 * l;
            for (std::size_t i = 0; i < n; ++i) y[i] += step * vj[i];
        }
        const double f = residual_norm_sq(sys, y);
        if (!have_best || f < best_f) {  // strict <: ties keep the smallest index
            best_f = f;
            best_y = y;
            have_best = true;
        }
    }

    const Vector e = rhombus_coefficients(basis.v, best_y, x_star);
    for (double ej : e)
        if (std::abs(ej) > 0.25 * l + slack) return false;
    return true;
}

}  // namespace qubolin
