#include "opcorrect/bayes/truth.hpp"

#include "opcorrect/fem/field.hpp"

#include <cmath>

namespace opcorrect::bayes {

double rosenbrock_truth(double x, double y) {
  const double a = 4.0 * x - 2.0;
  const double b = 4.0 * y - 1.0;
  const double ros = (1.0 - a) * (1.0 - a) + 100.0 * (b - a * a) * (b - a * a);
  return 1.5 * std::exp(-ros / 25.0) - 0.5;
}

Vector rosenbrock_truth(const fem::Mesh& mesh) {
  return fem::interpolate(mesh, [](double x, double y) { return rosenbrock_truth(x, y); });
}

std::string truth_formula() {
  return "m*(x,y) = 1.5*exp(-((1-a)^2 + 100*(b-a^2)^2)/25) - 0.5, a = 4x-2, b = 4y-1";
}

SyntheticData make_synthetic_data(const ObservationSetup& obs, const model::ReactionDiffusion& model,
                                  const Vector& m_star, double noise_pct, RngStream& rng) {
  require(std::isfinite(noise_pct) && noise_pct > 0.0, "noise_pct must be positive");
  const model::ForwardSolution sol = model.solve_forward(m_star);
  SyntheticData d;
  d.newton_iters = sol.newton_iters;
  d.clean = obs.observe(sol.u.values);
  d.sigma = noise_pct * d.clean.cwiseAbs().maxCoeff();
  require(d.sigma > 0.0, "synthetic data: observations are identically zero");
  d.y_star = d.clean;
  for (Eigen::Index k = 0; k < d.y_star.size(); ++k) d.y_star[k] += d.sigma * rng.normal();
  return d;
}

} // namespace opcorrect::bayes
