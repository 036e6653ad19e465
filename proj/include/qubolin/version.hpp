#pragma once

namespace qubolin {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qubolin
