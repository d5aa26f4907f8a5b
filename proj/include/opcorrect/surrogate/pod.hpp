#pragma once

#include "opcorrect/fem/sparse.hpp"

#include <vector>

namespace opcorrect::surrogate {

struct PodResult {
  Matrix basis;  // d x r, M-orthonormal
  Vector mean;
  /// Leading r eigenvalues of the empirical covariance (1/n normalization).
  Vector eigenvalues;
  /// Full Gram spectrum, nonincreasing, clamped at zero.
  Vector all_eigenvalues;
  /// Mean squared M-norm reconstruction error over the snapshots, equal to the
  /// sum of the discarded eigenvalues.
  double tail_energy = 0.0;
};

/// Proper orthogonal decomposition by the snapshot Gram method: eigenpairs of
/// the n x n matrix D^T M D / n for centered snapshots D. Directions with zero
/// energy are completed deterministically so the basis always has r columns.
PodResult compute_pod(const std::vector<Vector>& snapshots, const fem::CsrMatrix& M, int r_out);

/// Makes the columns of V orthonormal in the M inner product (two passes of
/// modified Gram-Schmidt). Columns that vanish are replaced by unit vectors.
void mass_orthonormalize(Matrix& V, const fem::CsrMatrix& M);

} // namespace opcorrect::surrogate
