#pragma once

#include "opcorrect/common/rng.hpp"
#include "opcorrect/bayes/observation.hpp"
#include "opcorrect/model/reaction_diffusion.hpp"

#include <string>

namespace opcorrect::bayes {

/// 1.5 exp(-ros(a, b) / 25) - 0.5 with a = 4x - 2, b = 4y - 1 and
/// ros = (1 - a)^2 + 100 (b - a^2)^2.
double rosenbrock_truth(double x, double y);
Vector rosenbrock_truth(const fem::Mesh& mesh);
/// Human-readable formula, recorded in run metadata.
std::string truth_formula();

struct SyntheticData {
  Vector y_star;
  Vector clean;  // B F(m*)
  double sigma = 0.0;
  int newton_iters = 0;
};

/// y* = B F(m*) + n with n ~ N(0, sigma^2 I), sigma = noise_pct * max|B F(m*)|.
SyntheticData make_synthetic_data(const ObservationSetup& obs, const model::ReactionDiffusion& model,
                                  const Vector& m_star, double noise_pct, RngStream& rng);

} // namespace opcorrect::bayes
