// Splits a 60-variable system into six 10x10 sub-problems and lets
// simulated annealing handle the sub-QUBOs, then compares against the
// full-rhombus run on the same instance.

#include <cstdio>

#include "qubolin/qubolin.hpp"

int main() {
    using namespace qubolin;

    const LinearSystem sys = random_instance(60, 0.0, 200.0, /*seed=*/5);
    const Vector x0(sys.size(), 0.0);
    const double f0 = residual_norm_sq(sys, x0);
    const double l0 = suggest_l(sys, x0);

    SolverSpec sa;
    sa.kind = SolverKind::simulated_annealing;
    sa.seed = 9;
    sa.sa.sweeps = 1500;
    sa.sa.restarts = 4;

    IterationParams params{.l_initial = l0, .c = 1.2, .n_iter = 120, .r_bits = 2};
    params.early_stop_f = 1e-10 * f0;

    const std::vector<std::size_t> composition(6, 10);
    const SolveReport blocks = solve_block(sys, x0, params, composition, sa, /*jobs=*/2);
    std::printf("block driver:   f/f0 = %.3e after %zu iterations (L0 = %.4g)\n",
                blocks.final_f() / f0, blocks.iterations.size(), l0);

    IterationParams rho{.l_initial = l0, .c = 2.0, .n_iter = 60};
    const SolveReport rhombus = solve_rhombus(sys, x0, rho);
    std::printf("rhombus driver: f/f0 = %.3e after %zu iterations\n",
                rhombus.final_f() / f0, rhombus.iterations.size());
    return 0;
}
