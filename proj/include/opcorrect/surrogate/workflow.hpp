#pragma once

#include "opcorrect/model/reaction_diffusion.hpp"
#include "opcorrect/surrogate/neural_operator.hpp"
#include "opcorrect/surrogate/training.hpp"

#include <vector>

namespace opcorrect::surrogate {

struct BasisOptions {
  int r_in = 20;
  int r_out = 20;
  int oversample = 10;
  /// Leading training samples used for the derivative operator.
  int n_basis_samples = 64;
  int jobs = 1;
};

struct BasisBuild {
  ReducedBasis basis;  // bound to the model mass, scales fitted
  long linear_solves = 0;
};

/// POD of the training states and derivative-informed basis from the first
/// n_basis_samples training pairs; input scales fitted on all training inputs.
BasisBuild build_reduced_basis(const model::ReactionDiffusion& model, const Vector& prior_mean,
                               const std::vector<Vector>& ms, const std::vector<Vector>& us,
                               const BasisOptions& options, RngStream& rng);

/// Encodes the pairs through `basis`.
TrainingSet make_training_set(const ReducedBasis& basis, const std::vector<Vector>& ms,
                              const std::vector<Vector>& us);

} // namespace opcorrect::surrogate
