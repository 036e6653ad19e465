#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "qubolin/detail/elimination.hpp"
#include "qubolin/matrix.hpp"
#include "qubolin/rng.hpp"

namespace qubolin {

/// Seeded random square system with entries i.i.d. uniform on [lo, hi).
///
/// Draw order is fixed (A row-major, then b after A is accepted), so a seed
/// identifies one instance bit for bit. A is rejected and redrawn when
/// pivoted elimination meets a pivot below 1e-10 · max|A|; more than
/// kMaxAttempts rejections in a row raise an error.
inline LinearSystem random_instance(std::size_t n, double lo, double hi, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("random_instance: n must be >= 1");
    if (!(lo < hi)) throw std::invalid_argument("random_instance: need lo < hi");

    constexpr int kMaxAttempts = 8;
    Xoshiro256PlusPlus rng(seed);

    DenseMatrix a(n, n);
    bool accepted = false;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        for (double& e : a.data()) e = rng.next_double(lo, hi);
        if (detail::is_numerically_nonsingular(a)) {
            accepted = true;
            break;
        }
    }
    if (!accepted)
        throw std::runtime_error("random_instance: singular A after " +
                                 std::to_string(kMaxAttempts) + " attempts (n=" +
                                 std::to_string(n) + ")");

    Vector b(n);
    for (double& e : b) e = rng.next_double(lo, hi);
    return LinearSystem(std::move(a), std::move(b));
}

}  // namespace qubolin
