#include "opcorrect/prior/bilaplacian.hpp"

#include <cmath>
#include <limits>

namespace opcorrect::prior {

BiLaplacianPrior::BiLaplacianPrior(const fem::Mesh& mesh, double alpha, double beta, Vector mean,
                                   std::optional<double> gamma)
    : space_(mesh), alpha_(alpha), beta_(beta), mean_(std::move(mean)) {
  require(std::isfinite(alpha) && alpha > 0.0, "BiLaplacianPrior: alpha must be positive");
  require(std::isfinite(beta) && beta > 0.0, "BiLaplacianPrior: beta must be positive");
  gamma_ = gamma.value_or(std::sqrt(alpha * beta));
  require(std::isfinite(gamma_) && gamma_ >= 0.0, "BiLaplacianPrior: gamma must be nonnegative");
  require(mean_.size() == mesh.n_nodes(), "BiLaplacianPrior: mean length differs from node count");
  require(mean_.allFinite(), "BiLaplacianPrior: mean must be finite");

  M_ = space_.mass();
  A_ = space_.stiffness(Vector::Ones(mesh.n_nodes()));
  A_.scale(alpha_);
  A_.add_scaled(beta_, M_);
  A_.add_scaled(gamma_, space_.boundary_mass());
  lumped_sqrt_ = M_.row_sums().cwiseSqrt();
}

Vector BiLaplacianPrior::colored_noise(const Vector& xi) const {
  require(xi.size() == dim(), "BiLaplacianPrior: noise length mismatch");
  return fem::cg_solve(A_, lumped_sqrt_.cwiseProduct(xi)).x;
}

Vector BiLaplacianPrior::sample_from_noise(const Vector& xi) const { return mean_ + colored_noise(xi); }

fem::NodalField BiLaplacianPrior::sample(RngStream& rng) const {
  return {sample_from_noise(rng.normal_vector(dim())), fem::FieldRole::parameter};
}

PointwiseStats estimate_pointwise_stats(const BiLaplacianPrior& prior, int n_samples, RngStream& rng) {
  require(n_samples >= 100, "estimate_pointwise_stats: need at least 100 samples");
  const fem::Mesh& mesh = prior.space().mesh();
  const int n = prior.dim();
  const int jc = mesh.ny / 2;
  const int ic = mesh.nx / 2;
  const int center = mesh.node_index(ic, jc);

  Vector sum = Vector::Zero(n);
  Vector sumsq = Vector::Zero(n);
  Vector cross = Vector::Zero(mesh.nx + 1);  // sum of x_center * x_(i, jc)
  for (int s = 0; s < n_samples; ++s) {
    const Vector m = prior.sample(rng).values;
    sum += m;
    sumsq += m.cwiseAbs2();
    for (int i = 0; i <= mesh.nx; ++i) cross[i] += m[center] * m[mesh.node_index(i, jc)];
  }
  const double ns = n_samples;
  const Vector mean = sum / ns;
  Vector var = (sumsq - ns * mean.cwiseAbs2()) / (ns - 1.0);
  var = var.cwiseMax(0.0);

  PointwiseStats stats;
  stats.variance = {var, fem::FieldRole::parameter};
  stats.correlation_length = std::numeric_limits<double>::infinity();
  const double threshold = std::exp(-1.0);
  double prev_corr = 1.0;
  double prev_dist = 0.0;
  for (int i = ic + 1; i <= mesh.nx; ++i) {
    const int node = mesh.node_index(i, jc);
    const double cov = (cross[i] - ns * mean[center] * mean[node]) / (ns - 1.0);
    const double corr = cov / std::sqrt(var[center] * var[node]);
    const double dist = mesh.nodes[node].x - mesh.nodes[center].x;
    if (corr < threshold) {
      // Linear interpolation between the bracketing nodes.
      stats.correlation_length = prev_dist + (prev_corr - threshold) / (prev_corr - corr) * (dist - prev_dist);
      break;
    }
    prev_corr = corr;
    prev_dist = dist;
  }
  return stats;
}

} // namespace opcorrect::prior
