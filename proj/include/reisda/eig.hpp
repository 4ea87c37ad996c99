#pragma once

#include "reisda/matrix.hpp"

#include <vector>

namespace reisda {

struct EigResult {
    std::vector<double> values;  // sorted descending
    Matrix vectors;              // orthonormal, eigenvector i in column i
};

// Symmetric eigendecomposition by cyclic Jacobi rotations. Input must be
// square and symmetric to 1e-10. Eigenvector signs are fixed so the
// largest-magnitude coordinate is positive (lowest index on ties), which
// makes downstream results deterministic.
EigResult symmetric_eig(const Matrix& a);

}  // namespace reisda
