#pragma once

#include "opcorrect/bayes/observation.hpp"
#include "opcorrect/fem/sparse.hpp"
#include "opcorrect/prior/bilaplacian.hpp"

#include <functional>
#include <vector>

namespace opcorrect::bayes {

using StateFn = std::function<Vector(const Vector&)>;

struct KlEstimate {
  double value = 0.0;
  /// Jackknife standard error.
  double standard_error = 0.0;
  /// Effective sample size of the surrogate-posterior weights exp(-Phi~).
  double ess = 0.0;
  bool reliable = true;  // ess >= 10
};

/// Paired importance-sampling estimate of KL(surrogate posterior || posterior)
///   ln(Z / Z~) + E[(Phi - Phi~) exp(-Phi~)] / Z~
/// from prior-sample potentials, Z = mean exp(-Phi), Z~ = mean exp(-Phi~).
KlEstimate kl_from_potentials(const std::vector<double>& phi, const std::vector<double>& phi_tilde);

/// Constants of the a priori posterior error bound, p = 2 and q = infinity.
struct BoundConstants {
  int p = 2;
  double c1 = 0.0;
  double c2_1 = 0.0;
  double c2_q = 0.0;
  double c3 = 0.0;
  double c_L = 0.0;
  double c_B = 0.0;
  double c_B_tilde = 0.0;
  /// L^2(prior; L2(mass)) norm of F - F~.
  double E_norm = 0.0;
  double c_BIP = 0.0;
  /// c1 (c2_1 + c3) c_L E_norm.
  double bound_value = 0.0;
  KlEstimate kl;
  double kl_estimate = 0.0;
  /// Samples whose ratio denominator vanished, per ratio (c_L, c_B, c_B_tilde).
  int skipped_L = 0;
  int skipped_B = 0;
  int skipped_B_tilde = 0;
  int n_mc = 0;
};

/// Prior potentials and observables of both maps on one shared sample set.
struct BoundSamples {
  std::vector<Vector> u;
  std::vector<Vector> u_tilde;
  std::vector<double> phi;
  std::vector<double> phi_tilde;
};

BoundSamples draw_bound_samples(const ObservationSetup& obs, const Vector& y_star, const StateFn& model_map,
                                const StateFn& surrogate_map, const prior::BiLaplacianPrior& prior, int n_mc,
                                RngStream& rng, int jobs = 1);

BoundConstants bound_constants_from_samples(const ObservationSetup& obs, const Vector& y_star,
                                            const fem::CsrMatrix& M, const BoundSamples& samples);

/// Requires n_mc >= 100. The KL estimate reuses the same samples.
BoundConstants estimate_bound_constants(const ObservationSetup& obs, const Vector& y_star, const StateFn& model_map,
                                        const StateFn& surrogate_map, const prior::BiLaplacianPrior& prior,
                                        const fem::CsrMatrix& M, int n_mc, RngStream& rng, int jobs = 1);

KlEstimate estimate_kl_importance(const ObservationSetup& obs, const Vector& y_star, const StateFn& model_map,
                                  const StateFn& surrogate_map, const prior::BiLaplacianPrior& prior, int n_mc,
                                  RngStream& rng, int jobs = 1);

} // namespace opcorrect::bayes
