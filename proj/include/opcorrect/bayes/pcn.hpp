#pragma once

#include "opcorrect/bayes/potential.hpp"
#include "opcorrect/prior/bilaplacian.hpp"

#include <cstdint>
#include <vector>

namespace opcorrect::bayes {

struct PcnOptions {
  double beta = 0.03;
  int n_steps = 1000;
  /// Keep the current state after every `thin` steps; n_steps must be a multiple.
  int thin = 1;
  /// Failed potential evaluations tolerated before the chain aborts.
  int max_failures = 10;
};

struct ChainRecord {
  std::vector<Vector> samples;
  /// Phi of the current state after each step.
  std::vector<double> potentials;
  std::vector<std::uint8_t> accept_flags;
  /// Newton iterations of every potential call, the initial one included.
  std::vector<int> call_newton_iters;
  double beta = 0.0;
  int thin = 1;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  EvalCounters counters;

  int n_steps() const { return static_cast<int>(potentials.size()); }
  double acceptance_rate() const;
};

/// pCN chain preserving N(m_pr, C): proposal
///   m_p = m_pr + sqrt(1 - beta^2)(m_k - m_pr) + beta (m_hat - m_pr),  m_hat ~ prior,
/// accepted when exp(Phi_k - Phi_p) >= r, r ~ U[0, 1). Each step draws one prior
/// sample then one uniform. A throwing potential counts as a rejection.
ChainRecord pcn_sample(const PotentialFn& potential, const prior::BiLaplacianPrior& prior,
                       const PcnOptions& options, RngStream& rng, const Vector& init);

/// Chain c uses RngStream(seed, c) and starts at init. Chains run on `jobs`
/// threads; `make_potential(c)` gives each its own potential.
std::vector<ChainRecord> run_chains(const std::function<PotentialFn(int)>& make_potential,
                                    const prior::BiLaplacianPrior& prior, const PcnOptions& options,
                                    int n_chains, std::uint64_t seed, const Vector& init, int jobs = 1);

EvalCounters merge_counters(const std::vector<ChainRecord>& chains);

} // namespace opcorrect::bayes
