#include "opcorrect/bayes/bounds.hpp"

#include "opcorrect/bayes/potential.hpp"
#include "opcorrect/common/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace opcorrect::bayes {

KlEstimate kl_from_potentials(const std::vector<double>& phi, const std::vector<double>& phi_tilde) {
  require(phi.size() == phi_tilde.size() && phi.size() >= 2, "kl: need at least two paired potentials");
  const std::size_t n = phi.size();
  double shift = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    require(std::isfinite(phi[i]) && std::isfinite(phi_tilde[i]), "kl: potentials must be finite");
    shift = std::min({shift, phi[i], phi_tilde[i]});
  }
  std::vector<double> w(n), wt(n), d(n);
  double S = 0.0, St = 0.0, T = 0.0, St2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::exp(-(phi[i] - shift));
    wt[i] = std::exp(-(phi_tilde[i] - shift));
    d[i] = (phi[i] - phi_tilde[i]) * wt[i];
    S += w[i];
    St += wt[i];
    T += d[i];
    St2 += wt[i] * wt[i];
  }
  auto kl = [](double s, double st, double t) { return std::log(s / st) + t / st; };

  KlEstimate out;
  out.value = kl(S, St, T);
  out.ess = St * St / St2;
  out.reliable = out.ess >= 10.0;

  std::vector<double> loo(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    loo[i] = kl(S - w[i], St - wt[i], T - d[i]);
    mean += loo[i];
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : loo) ss += (v - mean) * (v - mean);
  out.standard_error = std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
  return out;
}

BoundSamples draw_bound_samples(const ObservationSetup& obs, const Vector& y_star, const StateFn& model_map,
                                const StateFn& surrogate_map, const prior::BiLaplacianPrior& prior, int n_mc,
                                RngStream& rng, int jobs) {
  require(n_mc >= 2, "bound samples: n_mc must be at least 2");
  std::vector<Vector> ms;
  ms.reserve(static_cast<std::size_t>(n_mc));
  for (int i = 0; i < n_mc; ++i) ms.push_back(prior.sample(rng).values);

  BoundSamples s;
  const auto n = static_cast<std::size_t>(n_mc);
  s.u.resize(n);
  s.u_tilde.resize(n);
  s.phi.resize(n);
  s.phi_tilde.resize(n);
  parallel_for(n, jobs, [&](std::size_t i, std::size_t) {
    s.u[i] = model_map(ms[i]);
    s.u_tilde[i] = surrogate_map(ms[i]);
    s.phi[i] = misfit_potential(obs, y_star, s.u[i]);
    s.phi_tilde[i] = misfit_potential(obs, y_star, s.u_tilde[i]);
  });
  return s;
}

BoundConstants bound_constants_from_samples(const ObservationSetup& obs, const Vector& y_star,
                                            const fem::CsrMatrix& M, const BoundSamples& s) {
  const std::size_t n = s.phi.size();
  require(n >= 2 && s.u.size() == n && s.u_tilde.size() == n && s.phi_tilde.size() == n,
          "bound constants: inconsistent sample set");
  require(obs.sigma > 0.0, "bound constants: noise level must be positive");
  const double inv_var = 1.0 / (obs.sigma * obs.sigma);
  auto u_norm = [&](const Vector& v) { return std::sqrt(std::max(0.0, M.quadratic_form(v))); };

  BoundConstants b;
  b.n_mc = static_cast<int>(n);
  double c1_sum = 0.0, e_sum = 0.0;
  double min_phi_t = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Vector bf = obs.observe(s.u[i]);
    const Vector bft = obs.observe(s.u_tilde[i]);
    c1_sum += (inv_var * (bf + bft - 2.0 * y_star)).squaredNorm();

    const double err = u_norm(s.u[i] - s.u_tilde[i]);
    e_sum += err * err;
    const double eb = (bf - bft).norm();
    if (err > 0.0) b.c_L = std::max(b.c_L, eb / err);
    else ++b.skipped_L;
    const double nf = u_norm(s.u[i]);
    if (nf > 0.0) b.c_B = std::max(b.c_B, bf.norm() / nf);
    else ++b.skipped_B;
    const double nft = u_norm(s.u_tilde[i]);
    if (nft > 0.0) b.c_B_tilde = std::max(b.c_B_tilde, bft.norm() / nft);
    else ++b.skipped_B_tilde;
    min_phi_t = std::min(min_phi_t, s.phi_tilde[i]);
  }
  const double dn = static_cast<double>(n);
  b.c1 = 0.5 * std::sqrt(c1_sum / dn);
  b.E_norm = std::sqrt(e_sum / dn);

  // exp(-Phi~) relative to its sample maximum exp(-min Phi~).
  double rel_mean = 0.0;
  for (double p : s.phi_tilde) rel_mean += std::exp(-(p - min_phi_t));
  rel_mean /= dn;
  b.c2_q = std::exp(min_phi_t);
  b.c2_1 = b.c2_q / rel_mean;
  b.c3 = 1.0 / rel_mean;
  b.c_BIP = b.c1 * (b.c2_1 + b.c3) * b.c_L;
  b.bound_value = b.c_BIP * b.E_norm;

  b.kl = kl_from_potentials(s.phi, s.phi_tilde);
  b.kl_estimate = b.kl.value;
  return b;
}

BoundConstants estimate_bound_constants(const ObservationSetup& obs, const Vector& y_star, const StateFn& model_map,
                                        const StateFn& surrogate_map, const prior::BiLaplacianPrior& prior,
                                        const fem::CsrMatrix& M, int n_mc, RngStream& rng, int jobs) {
  require(n_mc >= 100, "estimate_bound_constants: n_mc must be at least 100");
  const BoundSamples s = draw_bound_samples(obs, y_star, model_map, surrogate_map, prior, n_mc, rng, jobs);
  return bound_constants_from_samples(obs, y_star, M, s);
}

KlEstimate estimate_kl_importance(const ObservationSetup& obs, const Vector& y_star, const StateFn& model_map,
                                  const StateFn& surrogate_map, const prior::BiLaplacianPrior& prior, int n_mc,
                                  RngStream& rng, int jobs) {
  require(n_mc >= 2, "estimate_kl_importance: n_mc must be at least 2");
  const BoundSamples s = draw_bound_samples(obs, y_star, model_map, surrogate_map, prior, n_mc, rng, jobs);
  return kl_from_potentials(s.phi, s.phi_tilde);
}

} // namespace opcorrect::bayes
