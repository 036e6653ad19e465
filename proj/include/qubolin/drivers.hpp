#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qubolin/geometry.hpp"
#include "qubolin/matrix.hpp"
#include "qubolin/qubo.hpp"
#include "qubolin/solvers.hpp"

namespace qubolin {

/// Which iterates keep a full x snapshot in the report.
enum class SnapshotPolicy { first, last, all };

struct IterationParams {
    double l_initial = 1.0;
    double c = 2.0;  // per-iteration shrink divisor, must be > 1
    std::size_t n_iter = 1;
    std::size_t r_bits = 1;
    std::optional<double> early_stop_f;
    SnapshotPolicy snapshots = SnapshotPolicy::last;
};

struct IterationRecord {
    std::size_t iteration = 0;  // 1-based
    double l = 0.0;             // edge length used for this step
    double f_value = 0.0;       // residual_norm_sq of the iterate, recomputed
    double elapsed_ms = 0.0;
    Vector x;  // empty unless covered by the snapshot policy
};

struct SolveReport {
    std::vector<IterationRecord> iterations;
    Vector x_star;
    bool converged = false;  // true iff early_stop_f was set and reached

    double final_f() const {
        return iterations.empty() ? 0.0 : iterations.back().f_value;
    }
};

namespace detail {

inline void validate_params(const IterationParams& p) {
    if (!(p.l_initial > 0.0) || !std::isfinite(p.l_initial))
        throw std::invalid_argument("IterationParams: l_initial must be positive and finite");
    if (!(p.c > 1.0)) throw std::invalid_argument("IterationParams: c must be > 1");
    if (p.n_iter < 1) throw std::invalid_argument("IterationParams: n_iter must be >= 1");
    if (p.r_bits < 1) throw std::invalid_argument("IterationParams: r_bits must be >= 1");
    if (p.early_stop_f && !(*p.early_stop_f >= 0.0))
        throw std::invalid_argument("IterationParams: early_stop_f must be >= 0");
}

class DriverLoop {
public:
    DriverLoop(const LinearSystem& sys, Vector x0, const IterationParams& params)
        : sys_(sys), params_(params), x_(std::move(x0)), l_(params.l_initial) {
        validate_params(params_);
        if (x_.size() != sys.size())
            throw std::invalid_argument("driver: x0 length must match the system");
        if (!all_finite(x_)) throw std::invalid_argument("driver: x0 must be finite");
    }

    // Runs `step(x, l)` n_iter times (or until early stop). The step returns
    // the next iterate; l shrinks by repeated division afterwards.
    template <typename Step>
    SolveReport run(Step&& step) {
        using clock = std::chrono::steady_clock;
        for (std::size_t k = 1; k <= params_.n_iter; ++k) {
            const auto t0 = clock::now();
            x_ = step(x_, l_);
            const double f = residual_norm_sq(sys_, x_);
            const std::chrono::duration<double, std::milli> dt = clock::now() - t0;

            IterationRecord rec;
            rec.iteration = k;
            rec.l = l_;
            rec.f_value = f;
            rec.elapsed_ms = dt.count();
            if (params_.snapshots == SnapshotPolicy::all ||
                (params_.snapshots == SnapshotPolicy::first && k == 1))
                rec.x = x_;
            report_.iterations.push_back(std::move(rec));

            l_ /= params_.c;
            if (params_.early_stop_f && f <= *params_.early_stop_f) {
                report_.converged = true;
                break;
            }
        }
        report_.x_star = x_;
        if (params_.snapshots == SnapshotPolicy::last && !report_.iterations.empty())
            report_.iterations.back().x = x_;
        return std::move(report_);
    }

private:
    const LinearSystem& sys_;
    IterationParams params_;
    Vector x_;
    double l_;
    SolveReport report_;
};

inline Vector row_sums(const DenseMatrix& m) {
    Vector s(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* row = m.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) acc += row[j];
        s[i] = acc;
    }
    return s;
}

}  // namespace detail

/// Square-lattice iteration: encode (A, b) over the current box, minimize
/// with the configured backend, decode, shrink. A_q and the quadratic part
/// A_qᵀA_q do not depend on (x0, L) and are built once; only the diagonal of
/// Q changes per iteration. f is not guaranteed to decrease monotonically
/// under heuristic backends; such steps are recorded, not fatal.
inline SolveReport solve_square(const LinearSystem& sys, const Vector& x0,
                                const IterationParams& params, const SolverSpec& solver) {
    const std::size_t n = sys.size();
    const std::size_t dim = n * params.r_bits;
    if (solver.kind == SolverKind::exhaustive && dim > detail::kExhaustiveLimit)
        throw std::invalid_argument("solve_square: exhaustive solver requires N*R <= 24");

    const Vector w = bit_weights(params.r_bits);
    const DenseMatrix a_q = detail::kron_bit_columns(sys.a, w);
    const DenseMatrix q0 = detail::column_gram(a_q);
    const Vector a_ones = detail::row_sums(sys.a);

    detail::DriverLoop loop(sys, x0, params);
    std::size_t iter = 0;
    return loop.run([&](const Vector& x, double l) {
        ++iter;
        Vector b_q(n);
        for (std::size_t i = 0; i < n; ++i) {
            double ax = 0.0;
            for (std::size_t j = 0; j < n; ++j) ax += sys.a(i, j) * x[j];
            b_q[i] = (sys.b[i] + l * a_ones[i] - ax) / l;
        }
        DenseMatrix q = q0;
        for (std::size_t i = 0; i < dim; ++i) {
            double g = 0.0;
            for (std::size_t k = 0; k < n; ++k) g += a_q(k, i) * b_q[k];
            q(i, i) -= 2.0 * g;
        }
        SolverSpec step_spec = solver;
        step_spec.seed = derive_seed(solver.seed, iter);
        const SolveOutcome outcome = solve_qubo(q, step_spec);
        const Vector xhat = bits_to_xhat(outcome.q, n, params.r_bits);
        Vector next(n);
        for (std::size_t i = 0; i < n; ++i) next[i] = x[i] + l * (xhat[i] - 1.0);
        return next;
    });
}

/// Rhombus iteration in the full conjugate basis. The QUBO is diagonal by
/// construction, so each bit is read off the sign of its linear coefficient
/// (q_i = 1 iff Q_i < 0, ties to 0) and no QUBO backend is involved.
/// R is fixed to 1; params.r_bits is ignored.
inline SolveReport solve_rhombus(const LinearSystem& sys, const Vector& x0,
                                 const IterationParams& params) {
    const std::size_t n = sys.size();
    const ConjugateBasis basis = conjugate_basis(sys.a);
    const DenseMatrix a_q = matmul(sys.a, transpose(basis.v));
    const Vector aq_ones = detail::row_sums(a_q);

#ifndef NDEBUG
    {
        // The full QUBO matrix A_qᵀA_q − 2·Diag(·) is diagonal up to the
        // basis' H-orthogonality tolerance; the quadratic part is V·H·Vᵀ.
        const DenseMatrix full = detail::column_gram(a_q);
        double max_diag = 0.0, max_off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                (i == j ? max_diag : max_off) =
                    std::max(i == j ? max_diag : max_off, std::abs(full(i, j)));
        if (max_off > 1e-8 * max_diag)
            throw std::runtime_error("solve_rhombus: QUBO matrix is not diagonal");
    }
#endif

    detail::DriverLoop loop(sys, x0, params);
    return loop.run([&](const Vector& x, double l) {
        Vector b_q(n);
        for (std::size_t i = 0; i < n; ++i) {
            double ax = 0.0;
            for (std::size_t j = 0; j < n; ++j) ax += sys.a(i, j) * x[j];
            b_q[i] = (sys.b[i] + 0.5 * l * aq_ones[i] - ax) / l;
        }
        const Vector g = matvec_transposed(a_q, b_q);
        Vector next = x;
        for (std::size_t i = 0; i < n; ++i) {
            const double coeff = basis.c[i] - 2.0 * g[i];
            const double step = (coeff < 0.0 ? 0.5 : -0.5) * l;
            const double* vi = basis.v.row(i);
            for (std::size_t j = 0; j < n; ++j) next[j] += step * vi[j];
        }
        return next;
    });
}

/// Block-decomposed iteration: one sub-QUBO per composition block, solved
/// independently (order- and concurrency-invariant by per-block seeding),
/// flattened in block order and decoded through Vᵀ with the I/2 centering.
inline SolveReport solve_block(const LinearSystem& sys, const Vector& x0,
                               const IterationParams& params,
                               const std::vector<std::size_t>& composition,
                               const SolverSpec& solver, std::size_t jobs = 1) {
    const std::size_t n = sys.size();
    const std::size_t r = params.r_bits;
    const BlockBasis basis = block_conjugate_basis(sys.a, composition);
    const std::size_t m = basis.composition.size();

    if (solver.kind == SolverKind::exhaustive)
        for (std::size_t width : basis.composition)
            if (width * r > detail::kExhaustiveLimit)
                throw std::invalid_argument(
                    "solve_block: exhaustive solver requires max block size * R <= 24");

    const Vector w = bit_weights(r);
    const DenseMatrix a_v = matmul(sys.a, transpose(basis.v));
    const DenseMatrix a_q = detail::kron_bit_columns(a_v, w);
    const Vector av_ones = detail::row_sums(a_v);

    // Q₀ of block j is H_j ⊗ (wᵀw); only its diagonal shifts per iteration.
    std::vector<DenseMatrix> q0(m);
    std::vector<std::size_t> block_start(m, 0);
    {
        std::size_t start = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t width = basis.composition[j];
            block_start[j] = start;
            DenseMatrix& q = q0[j];
            q = DenseMatrix(width * r, width * r);
            for (std::size_t i = 0; i < width; ++i)
                for (std::size_t k = 0; k < width; ++k)
                    for (std::size_t s = 0; s < r; ++s)
                        for (std::size_t t = 0; t < r; ++t)
                            q(i * r + s, k * r + t) = basis.blocks[j](i, k) * (w[s] * w[t]);
            start += width;
        }
    }

    detail::DriverLoop loop(sys, x0, params);
    std::size_t iter = 0;
    return loop.run([&](const Vector& x, double l) {
        ++iter;
        Vector b_q(n);
        for (std::size_t i = 0; i < n; ++i) {
            double ax = 0.0;
            for (std::size_t j = 0; j < n; ++j) ax += sys.a(i, j) * x[j];
            b_q[i] = (sys.b[i] + 0.5 * l * av_ones[i] - ax) / l;
        }
        const Vector g = matvec_transposed(a_q, b_q);

        std::vector<DenseMatrix> subproblems = q0;
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t base = block_start[j] * r;
            for (std::size_t t = 0; t < subproblems[j].rows(); ++t)
                subproblems[j](t, t) -= 2.0 * g[base + t];
        }

        SolverSpec step_spec = solver;
        step_spec.seed = derive_seed(solver.seed, iter);
        std::vector<SolveOutcome> outcomes = solve_qubo_blocks(subproblems, step_spec, {}, jobs);

        BinaryAssignment bits;
        bits.reserve(n * r);
        for (const SolveOutcome& o : outcomes) bits.insert(bits.end(), o.q.begin(), o.q.end());
        const Vector xhat = bits_to_xhat(bits, n, r);

        Vector next = x;
        for (std::size_t i = 0; i < n; ++i) {
            const double step = l * (xhat[i] - 0.5);
            const double* vi = basis.v.row(i);
            for (std::size_t j = 0; j < n; ++j) next[j] += step * vi[j];
        }
        return next;
    });
}

/// Initial edge length for the rhombus/block drivers: 2·max_j |D_j| with a
/// 25% safety margin, where D are the conjugate-basis coefficients of the
/// direct-elimination reference solution relative to x0.
inline double suggest_l(const LinearSystem& sys, const Vector& x0, const ConjugateBasis& basis) {
    const Vector x_ref = detail::solve_dense(sys.a, sys.b);
    const Vector d = rhombus_coefficients(basis.v, x0, x_ref);
    const double dmax = max_abs(d);
    if (!(dmax > 0.0)) return 1.0;  // x0 already solves the system; any box works
    return 2.0 * dmax * 1.25;
}

inline double suggest_l(const LinearSystem& sys, const Vector& x0) {
    return suggest_l(sys, x0, conjugate_basis(sys.a));
}

}  // namespace qubolin
