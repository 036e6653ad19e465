// Minimal library walk-through: encode the worked 2x2 system, solve its QUBO
// exhaustively, then let the rhombus driver polish the answer.

#include <cstdio>

#include "qubolin/qubolin.hpp"

int main() {
    using namespace qubolin;

    DenseMatrix a(2, 2);
    a(0, 0) = 1;
    a(0, 1) = 2;
    a(1, 0) = 3;
    a(1, 1) = 4;
    const LinearSystem sys(std::move(a), {5.0, 6.0});

    // One square-lattice QUBO over the box [x0 - L, x0 + L(1 - 2^{1-R})]^2.
    const SearchBox box({0.0, 0.0}, 10.0, 3);
    const QuboProblem problem = encode_square(sys, box);

    SolverSpec spec;  // exhaustive
    const SolveOutcome best = solve_qubo(problem, spec);
    const Vector x = box_decode(box, best.q);
    std::printf("one QUBO step:  x = (%g, %g), f = %g\n", x[0], x[1],
                residual_norm_sq(sys, x));

    // The conjugate-direction geometry makes every iteration's QUBO diagonal.
    const IterationParams params{.l_initial = 20.0, .c = 2.0, .n_iter = 50};
    const SolveReport report = solve_rhombus(sys, {0.0, 0.0}, params);
    std::printf("rhombus driver: x = (%.12g, %.12g), f = %.3g after %zu iterations\n",
                report.x_star[0], report.x_star[1], report.final_f(),
                report.iterations.size());
    return 0;
}
