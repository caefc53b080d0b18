#pragma once

#include "fedgwc/matrix.hpp"

namespace fedgwc {

/// Eigenvalues in descending order; column i of `vectors` is the unit
/// eigenvector for values[i]. Signs follow a fixed convention (the largest
/// magnitude component of each vector is positive) so results are reproducible.
struct EigenDecomposition {
    std::vector<double> values;
    Matrix vectors;
};

/// Cyclic Jacobi rotations for a real symmetric matrix. Deterministic across
/// platforms: plain double arithmetic, fixed sweep order, no pivot heuristics.
/// Converges when the off-diagonal Frobenius mass drops below tol * ||A||_F.
EigenDecomposition jacobi_eigen(const Matrix& sym, double tol = 1e-13, int max_sweeps = 64);

}  // namespace fedgwc
