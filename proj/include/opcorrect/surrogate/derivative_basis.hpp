#pragma once

#include "opcorrect/common/rng.hpp"
#include "opcorrect/fem/sparse.hpp"
#include "opcorrect/model/reaction_diffusion.hpp"

#include <functional>
#include <vector>

namespace opcorrect::surrogate {

struct EigenResult {
  Matrix vectors;  // B-orthonormal columns
  Vector eigenvalues;  // nonincreasing
  int achieved_rank = 0;
};

/// Double-pass randomized solver for the leading eigenpairs of A v = lambda B v
/// with A symmetric positive semidefinite and B the mass matrix. `apply_A`
/// maps a block of columns to A times that block. The Gaussian test matrix is
/// drawn column by column, so its leading columns do not depend on `oversample`.
/// Optional subspace (power) iterations sharpen slowly decaying spectra.
EigenResult randomized_generalized_eigensolver(const std::function<Matrix(const Matrix&)>& apply_A,
                                               const fem::CsrMatrix& B, int rank, int oversample,
                                               RngStream& rng, int power_iterations = 0);

struct DerivativeBasis {
  Matrix basis;  // d_m x r_in, mass-orthonormal
  Vector eigenvalues;
  /// Linearized (tangent and adjoint) solves spent.
  long linear_solves = 0;
  /// Newton linear solves for samples supplied without a state.
  long forward_solves = 0;
};

/// Leading eigenpairs of H = (1/n) sum_j dF*(m_j) dF(m_j), self-adjoint in the
/// parameter mass inner product. `states` may be empty, in which case each
/// sample is solved here.
DerivativeBasis compute_derivative_basis(const model::ReactionDiffusion& model,
                                         const std::vector<Vector>& m_samples,
                                         const std::vector<Vector>& states, int r_in, int oversample,
                                         RngStream& rng, int jobs = 1, int power_iterations = 0);

} // namespace opcorrect::surrogate
