#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qubolin/matrix.hpp"

namespace qubolin {

/// Flattened binary assignment. Bits are grouped per coordinate, most
/// significant (weight 2⁰) first: q₁⁽⁰⁾…q₁⁽ᴿ⁻¹⁾, q₂⁽⁰⁾, …
using BinaryAssignment = std::vector<std::uint8_t>;

/// Search region for the square-lattice encoding: an N-cube of edge length l
/// anchored at the guess x0, sampled with r bits per coordinate.
struct SearchBox {
    Vector x0;
    double l;
    std::size_t r;

    SearchBox(Vector x0_in, double l_in, std::size_t r_in)
        : x0(std::move(x0_in)), l(l_in), r(r_in) {
        if (!(l > 0.0) || !std::isfinite(l))
            throw std::invalid_argument("SearchBox: edge length must be positive and finite");
        if (r < 1) throw std::invalid_argument("SearchBox: need at least one bit per coordinate");
        if (!all_finite(x0)) throw std::invalid_argument("SearchBox: x0 must be finite");
    }
};

/// A QUBO instance min qᵀQq together with the constant dropped when the
/// residual functional is expanded: ‖A_q·q − b_q‖² = energy(q) + offset with
/// offset = b_q·b_q. Carrying the offset keeps the functional identities
/// exactly testable. a_q and b_q are retained for diagnostics.
struct QuboProblem {
    DenseMatrix q_matrix;
    double offset = 0.0;
    DenseMatrix a_q;
    Vector b_q;

    std::size_t dimension() const { return q_matrix.rows(); }
};

/// Bit weights (2⁰, 2⁻¹, …, 2^{1−r}) of one coordinate.
inline Vector bit_weights(std::size_t r) {
    Vector w(r);
    double p = 1.0;
    for (std::size_t s = 0; s < r; ++s, p *= 0.5) w[s] = p;
    return w;
}

namespace detail {

/// M ⊗ w with w a row of bit weights: column j·r+s holds M(:,j)·w_s.
inline DenseMatrix kron_bit_columns(const DenseMatrix& m, const Vector& w) {
    const std::size_t r = w.size();
    DenseMatrix out(m.rows(), m.cols() * r);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            for (std::size_t s = 0; s < r; ++s) out(i, j * r + s) = m(i, j) * w[s];
    return out;
}

/// MᵀM with the upper triangle mirrored, so the result is symmetric exactly.
inline DenseMatrix column_gram(const DenseMatrix& m) {
    const std::size_t d = m.cols();
    DenseMatrix g(d, d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < m.rows(); ++k) s += m(k, i) * m(k, j);
            g(i, j) = s;
            g(j, i) = s;
        }
    return g;
}

}  // namespace detail

/// x̂_i = Σ_s q_i^(s)·2⁻ˢ, each coordinate in [0, 2 − 2^{1−r}].
inline Vector bits_to_xhat(const BinaryAssignment& q, std::size_t n, std::size_t r) {
    if (q.size() != n * r) throw std::invalid_argument("bits_to_xhat: bit count must be n*r");
    const Vector w = bit_weights(r);
    Vector xhat(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < r; ++k)
            if (q[i * r + k]) s += w[k];
        xhat[i] = s;
    }
    return xhat;
}

/// x = x0 + l·(x̂ − I). The box spans [x0 − l, x0 + l(1 − 2^{1−r})] per
/// coordinate; with r = 1 it degenerates to the one-sided pair {x0 − l, x0}.
inline Vector box_decode(const SearchBox& box, const BinaryAssignment& q) {
    const std::size_t n = box.x0.size();
    Vector x = bits_to_xhat(q, n, box.r);
    for (std::size_t i = 0; i < n; ++i) x[i] = box.x0[i] + box.l * (x[i] - 1.0);
    return x;
}

/// Square-lattice QUBO encoding of (A, b) over a search box:
///   A_q = A ⊗ (2⁰, …, 2^{1−r}),   b_q = (b + l·A·I − A·x0)/l,
///   Q   = A_qᵀA_q − 2·Diag(A_qᵀ·b_q),   offset = b_q·b_q.
/// Q is built symmetric exactly (mirrored upper triangle).
inline QuboProblem encode_square(const LinearSystem& sys, const SearchBox& box) {
    const std::size_t n = sys.size();
    if (box.x0.size() != n) throw std::invalid_argument("encode_square: x0 length mismatch");
    const std::size_t r = box.r;
    const std::size_t dim = n * r;
    const Vector w = bit_weights(r);

    QuboProblem p;
    p.a_q = detail::kron_bit_columns(sys.a, w);

    p.b_q.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double ai_ones = 0.0, ai_x0 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            ai_ones += sys.a(i, j);
            ai_x0 += sys.a(i, j) * box.x0[j];
        }
        p.b_q[i] = (sys.b[i] + box.l * ai_ones - ai_x0) / box.l;
    }

    p.q_matrix = detail::column_gram(p.a_q);
    for (std::size_t i = 0; i < dim; ++i) {
        double g = 0.0;
        for (std::size_t k = 0; k < n; ++k) g += p.a_q(k, i) * p.b_q[k];
        p.q_matrix(i, i) -= 2.0 * g;
    }

    p.offset = norm2_sq(p.b_q);
    return p;
}

/// qᵀQq with bits read as 0/1 reals.
inline double energy(const DenseMatrix& q_matrix, const BinaryAssignment& q) {
    if (!q_matrix.square() || q_matrix.rows() != q.size())
        throw std::invalid_argument("energy: assignment length must match Q dimension");
    double e = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (!q[i]) continue;
        const double* row = q_matrix.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j)
            if (q[j]) s += row[j];
        e += s;
    }
    return e;
}

inline double energy(const QuboProblem& p, const BinaryAssignment& q) {
    return energy(p.q_matrix, q);
}

}  // namespace qubolin
