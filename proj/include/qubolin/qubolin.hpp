#pragma once

// Umbrella header: solving square linear systems A·x = b by iterated QUBO
// encodings — square lattice, rhombus (conjugate-direction) geometry, and
// block-decomposed sub-QUBOs.

#include "qubolin/drivers.hpp"
#include "qubolin/experiment.hpp"
#include "qubolin/geometry.hpp"
#include "qubolin/instance.hpp"
#include "qubolin/matrix.hpp"
#include "qubolin/qubo.hpp"
#include "qubolin/rng.hpp"
#include "qubolin/solvers.hpp"
#include "qubolin/text_io.hpp"
#include "qubolin/version.hpp"
