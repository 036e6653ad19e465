#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qubolin/qubo.hpp"
#include "qubolin/rng.hpp"

namespace qubolin {

enum class SolverKind { exhaustive, simulated_annealing, tabu };

inline const char* to_string(SolverKind k) {
    switch (k) {
        case SolverKind::exhaustive: return "exhaustive";
        case SolverKind::simulated_annealing: return "simulated-annealing";
        case SolverKind::tabu: return "tabu";
    }
    return "unknown";
}

/// Simulated-annealing knobs. Non-positive betas mean "auto": the schedule is
/// scaled by the mean |Q| entry (beta_initial = 0.01/⟨|Q|⟩, beta_final =
/// 10/⟨|Q|⟩), which keeps the defaults scale-free.
struct SaParams {
    std::size_t sweeps = 1000;
    std::size_t restarts = 4;
    double beta_initial = 0.0;
    double beta_final = 0.0;
};

struct TabuParams {
    std::size_t tenure = 10;
    std::size_t max_moves = 2000;
    std::size_t restarts = 4;
};

struct SolverSpec {
    SolverKind kind = SolverKind::exhaustive;
    std::uint64_t seed = 0;
    SaParams sa;
    TabuParams tabu;
};

struct SolveOutcome {
    BinaryAssignment q;
    double energy = 0.0;
    std::uint64_t evaluations = 0;
};

namespace detail {

// Incremental single-flip machinery shared by all backends. Keeps the row
// activity s_i = Σ_j Q_ij q_j so a flip's energy delta is O(1) and applying
// it is O(n).
class FlipState {
public:
    explicit FlipState(const DenseMatrix& q_matrix)
        : q_(&q_matrix), bits_(q_matrix.rows(), 0), activity_(q_matrix.rows(), 0.0) {}

    void reset(const BinaryAssignment& bits) {
        const std::size_t n = bits_.size();
        bits_ = bits;
        energy_ = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = q_->row(i);
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (bits_[j]) s += row[j];
            activity_[i] = s;
            if (bits_[i]) energy_ += s;
        }
    }

    std::size_t size() const { return bits_.size(); }
    const BinaryAssignment& bits() const { return bits_; }
    double energy() const { return energy_; }

    double flip_delta(std::size_t i) const {
        const double qii = (*q_)(i, i);
        // delta = ±(Q_ii + 2·Σ_{j≠i} Q_ij q_j)
        const double cross = activity_[i] - qii * bits_[i];
        return bits_[i] ? -(qii + 2.0 * cross) : (qii + 2.0 * cross);
    }

    void apply_flip(std::size_t i) {
        energy_ += flip_delta(i);
        const double d = bits_[i] ? -1.0 : 1.0;
        bits_[i] ^= 1;
        const std::size_t n = bits_.size();
        const double* row = q_->row(i);
        for (std::size_t j = 0; j < n; ++j) activity_[j] += d * row[j];
    }

private:
    const DenseMatrix* q_;
    BinaryAssignment bits_;
    Vector activity_;
    double energy_ = 0.0;
};

inline constexpr std::size_t kExhaustiveLimit = 24;

// Full enumeration in ascending integer order of q (q_1 is the most
// significant bit), so ties resolve to the lowest such integer.
inline SolveOutcome solve_exhaustive(const DenseMatrix& q_matrix) {
    const std::size_t n = q_matrix.rows();
    if (n > kExhaustiveLimit)
        throw std::invalid_argument("solve_qubo: exhaustive limited to dimension " +
                                    std::to_string(kExhaustiveLimit) + ", got " +
                                    std::to_string(n));
    FlipState state(q_matrix);
    state.reset(BinaryAssignment(n, 0));

    BinaryAssignment best_bits = state.bits();
    double best_energy = state.energy();
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t m = 1; m < total; ++m) {
        // Counter bit p (LSB) is q index n-1-p; m equals q read as an integer.
        std::uint64_t changed = m ^ (m - 1);
        while (changed) {
            const int p = std::countr_zero(changed);
            changed &= changed - 1;
            state.apply_flip(n - 1 - static_cast<std::size_t>(p));
        }
        if (state.energy() < best_energy) {
            best_energy = state.energy();
            best_bits = state.bits();
        }
    }
    SolveOutcome out;
    out.q = std::move(best_bits);
    out.energy = energy(q_matrix, out.q);
    out.evaluations = total;
    return out;
}

inline double mean_abs_entry(const DenseMatrix& m) {
    double s = 0.0;
    for (double v : m.data()) s += std::abs(v);
    return m.data().empty() ? 0.0 : s / static_cast<double>(m.data().size());
}

struct ResolvedBetas {
    double initial;
    double final_;
};

inline ResolvedBetas resolve_betas(const DenseMatrix& q_matrix, const SaParams& p) {
    ResolvedBetas b{p.beta_initial, p.beta_final};
    if (b.initial <= 0.0 || b.final_ <= 0.0) {
        const double scale = mean_abs_entry(q_matrix);
        const double inv = scale > 0.0 ? 1.0 / scale : 1.0;
        if (b.initial <= 0.0) b.initial = 0.01 * inv;
        if (b.final_ <= 0.0) b.final_ = 10.0 * inv;
    }
    if (!(b.initial < b.final_))
        throw std::invalid_argument("solve_qubo: need beta_initial < beta_final");
    return b;
}

inline BinaryAssignment random_bits(std::size_t n, Xoshiro256PlusPlus& rng) {
    BinaryAssignment bits(n);
    for (auto& b : bits) b = rng.next_bit() ? 1 : 0;
    return bits;
}

inline SolveOutcome solve_sa(const DenseMatrix& q_matrix, const SolverSpec& spec) {
    const SaParams& p = spec.sa;
    if (p.sweeps < 1 || p.restarts < 1)
        throw std::invalid_argument("solve_qubo: SA sweeps and restarts must be >= 1");
    const ResolvedBetas betas = resolve_betas(q_matrix, p);
    const std::size_t n = q_matrix.rows();
    const double ratio =
        p.sweeps > 1 ? std::pow(betas.final_ / betas.initial,
                                1.0 / static_cast<double>(p.sweeps - 1))
                     : 1.0;

    FlipState state(q_matrix);
    BinaryAssignment best_bits;
    double best_energy = std::numeric_limits<double>::infinity();
    std::uint64_t evaluations = 0;

    for (std::size_t restart = 0; restart < p.restarts; ++restart) {
        Xoshiro256PlusPlus rng(derive_seed(spec.seed, restart, 0x5A17));
        state.reset(random_bits(n, rng));
        if (state.energy() < best_energy) {
            best_energy = state.energy();
            best_bits = state.bits();
        }
        double beta = betas.initial;
        for (std::size_t sweep = 0; sweep < p.sweeps; ++sweep, beta *= ratio) {
            for (std::size_t i = 0; i < n; ++i) {
                ++evaluations;
                const double delta = state.flip_delta(i);
                if (delta > 0.0 && rng.next_double() >= std::exp(-beta * delta)) continue;
                state.apply_flip(i);
                if (state.energy() < best_energy) {
                    best_energy = state.energy();
                    best_bits = state.bits();
                }
            }
        }
    }
    SolveOutcome out;
    out.q = std::move(best_bits);
    out.energy = energy(q_matrix, out.q);
    out.evaluations = evaluations;
    return out;
}

// Steepest-descent single flips with a tabu tenure on recently flipped
// indices; a tabu move is admitted when it would beat the incumbent
// (aspiration). The best admissible move is taken even when worsening.
inline SolveOutcome solve_tabu(const DenseMatrix& q_matrix, const SolverSpec& spec) {
    const TabuParams& p = spec.tabu;
    if (p.tenure < 1 || p.max_moves < 1 || p.restarts < 1)
        throw std::invalid_argument("solve_qubo: tabu parameters must be >= 1");
    const std::size_t n = q_matrix.rows();

    FlipState state(q_matrix);
    BinaryAssignment best_bits;
    double best_energy = std::numeric_limits<double>::infinity();
    std::uint64_t evaluations = 0;

    for (std::size_t restart = 0; restart < p.restarts; ++restart) {
        Xoshiro256PlusPlus rng(derive_seed(spec.seed, restart, 0x7AB5));
        state.reset(random_bits(n, rng));
        if (state.energy() < best_energy) {
            best_energy = state.energy();
            best_bits = state.bits();
        }
        std::vector<std::uint64_t> tabu_until(n, 0);
        for (std::uint64_t move = 1; move <= p.max_moves; ++move) {
            std::size_t chosen = n;
            double chosen_delta = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) {
                ++evaluations;
                const double delta = state.flip_delta(i);
                const bool tabu = move < tabu_until[i];
                if (tabu && !(state.energy() + delta < best_energy)) continue;
                if (delta < chosen_delta) {
                    chosen_delta = delta;
                    chosen = i;
                }
            }
            if (chosen == n) break;  // every move tabu and none aspirates
            state.apply_flip(chosen);
            tabu_until[chosen] = move + p.tenure + 1;
            if (state.energy() < best_energy) {
                best_energy = state.energy();
                best_bits = state.bits();
            }
        }
    }
    SolveOutcome out;
    out.q = std::move(best_bits);
    out.energy = energy(q_matrix, out.q);
    out.evaluations = evaluations;
    return out;
}

}  // namespace detail

/// Minimize qᵀQq over binary q with the backend named in spec. Deterministic
/// given (q_matrix, spec) including the seed. The exhaustive backend returns
/// a global minimizer (ties: lowest q read as an integer, q_1 most
/// significant); the heuristics return the best assignment they encountered.
inline SolveOutcome solve_qubo(const DenseMatrix& q_matrix, const SolverSpec& spec) {
    if (!q_matrix.square()) throw std::invalid_argument("solve_qubo: Q must be square");
    if (q_matrix.rows() == 0) throw std::invalid_argument("solve_qubo: empty problem");
    switch (spec.kind) {
        case SolverKind::exhaustive: return detail::solve_exhaustive(q_matrix);
        case SolverKind::simulated_annealing: return detail::solve_sa(q_matrix, spec);
        case SolverKind::tabu: return detail::solve_tabu(q_matrix, spec);
    }
    throw std::invalid_argument("solve_qubo: unknown solver kind");
}

inline SolveOutcome solve_qubo(const QuboProblem& p, const SolverSpec& spec) {
    return solve_qubo(p.q_matrix, spec);
}

/// Solve m independent sub-QUBOs. Each block b uses its own seed
/// derive_seed(spec.seed, b), so the outcome vector (joined by block index)
/// does not depend on solve order or on the number of worker threads.
/// `order` permutes the sequential solve order; `jobs` > 1 dispatches blocks
/// to that many async workers.
inline std::vector<SolveOutcome> solve_qubo_blocks(const std::vector<DenseMatrix>& blocks,
                                                   const SolverSpec& spec,
                                                   const std::vector<std::size_t>& order = {},
                                                   std::size_t jobs = 1) {
    const std::size_t m = blocks.size();
    std::vector<std::size_t> seq = order;
    if (seq.empty()) {
        seq.resize(m);
        std::iota(seq.begin(), seq.end(), std::size_t{0});
    }
    if (seq.size() != m) throw std::invalid_argument("solve_qubo_blocks: bad order length");

    std::vector<SolveOutcome> out(m);
    auto solve_one = [&](std::size_t b) {
        SolverSpec block_spec = spec;
        block_spec.seed = derive_seed(spec.seed, b);
        out[b] = solve_qubo(blocks[b], block_spec);
    };

    if (jobs <= 1 || m <= 1) {
        for (std::size_t b : seq) solve_one(b);
        return out;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= m) break;
            solve_one(b);
        }
    };
    std::vector<std::future<void>> futures;
    for (std::size_t w = 0; w < std::min(jobs, m); ++w)
        futures.push_back(std::async(std::launch::async, worker));
    for (auto& f : futures) f.get();
    return out;
}

}  // namespace qubolin
