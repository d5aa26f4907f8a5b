#pragma once

#include "opcorrect/common/rng.hpp"
#include "opcorrect/fem/cg.hpp"
#include "opcorrect/fem/field.hpp"
#include "opcorrect/fem/p1_space.hpp"

#include <optional>

namespace opcorrect::prior {

/// Gaussian field N(m_pr, A^-1 M_L A^-1) with A = alpha K + beta M + gamma M_boundary,
/// the discrete squared inverse of a Robin-type elliptic operator. Samples are
/// m = m_pr + A^-1 sqrt(M_L) xi with M_L the lumped mass. Immutable once built;
/// callers supply their own random stream.
class BiLaplacianPrior {
public:
  BiLaplacianPrior(const fem::Mesh& mesh, double alpha, double beta, Vector mean,
                   std::optional<double> gamma = std::nullopt);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  int exponent() const { return 2; }
  const Vector& mean() const { return mean_; }
  const fem::CsrMatrix& A() const { return A_; }
  const fem::CsrMatrix& M() const { return M_; }
  const Vector& lumped_sqrt() const { return lumped_sqrt_; }
  const fem::P1Space& space() const { return space_; }
  int dim() const { return static_cast<int>(mean_.size()); }

  /// Consumes dim() standard normals from the stream.
  fem::NodalField sample(RngStream& rng) const;
  /// m_pr + A^-1 sqrt(M_L) xi for a given white-noise vector.
  Vector sample_from_noise(const Vector& xi) const;
  /// A^-1 sqrt(M_L) xi, the mean-free part.
  Vector colored_noise(const Vector& xi) const;

private:
  fem::P1Space space_;
  double alpha_;
  double beta_;
  double gamma_;
  Vector mean_;
  fem::CsrMatrix M_;
  fem::CsrMatrix A_;
  Vector lumped_sqrt_;
};

struct PointwiseStats {
  fem::NodalField variance;
  /// Distance along the horizontal midline at which the empirical correlation
  /// with the center node first drops below exp(-1); infinity if it never does.
  double correlation_length = 0.0;
};

PointwiseStats estimate_pointwise_stats(const BiLaplacianPrior& prior, int n_samples, RngStream& rng);

} // namespace opcorrect::prior
