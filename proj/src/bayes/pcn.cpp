#include "opcorrect/bayes/pcn.hpp"

#include "opcorrect/common/parallel.hpp"

#include <cmath>
#include <iostream>
#include <numeric>

namespace opcorrect::bayes {

double ChainRecord::acceptance_rate() const {
  if (accept_flags.empty()) return 0.0;
  const long accepted = std::accumulate(accept_flags.begin(), accept_flags.end(), 0L);
  return static_cast<double>(accepted) / static_cast<double>(accept_flags.size());
}

ChainRecord pcn_sample(const PotentialFn& potential, const prior::BiLaplacianPrior& prior,
                       const PcnOptions& o, RngStream& rng, const Vector& init) {
  require(o.beta > 0.0 && o.beta < 1.0, "pcn: beta must lie in (0, 1)");
  require(o.n_steps >= 1 && o.thin >= 1, "pcn: n_steps and thin must be positive");
  require(o.n_steps % o.thin == 0, "pcn: n_steps must be a multiple of thin");
  require(o.max_failures >= 0, "pcn: max_failures must be nonnegative");
  require(init.size() == prior.dim() && init.allFinite(), "pcn: initial state does not match the prior");

  ChainRecord rec;
  rec.beta = o.beta;
  rec.thin = o.thin;
  rec.seed = rng.seed();
  rec.stream = rng.stream();
  rec.samples.reserve(static_cast<std::size_t>(o.n_steps / o.thin));
  rec.potentials.reserve(static_cast<std::size_t>(o.n_steps));
  rec.accept_flags.reserve(static_cast<std::size_t>(o.n_steps));
  rec.call_newton_iters.reserve(static_cast<std::size_t>(o.n_steps + 1));

  const Vector& m_pr = prior.mean();
  const double contraction = std::sqrt(1.0 - o.beta * o.beta);

  Vector m = init;
  PotentialValue current = potential(m);
  require(std::isfinite(current.phi), "pcn: potential at the initial state is not finite");
  rec.counters += current.cost;
  rec.call_newton_iters.push_back(static_cast<int>(current.cost.newton_iters));
  double phi = current.phi;

  int failures = 0;
  for (int k = 0; k < o.n_steps; ++k) {
    const Vector m_hat = prior.sample(rng).values;
    const double r = rng.uniform();
    const Vector m_p = m_pr + contraction * (m - m_pr) + o.beta * (m_hat - m_pr);

    bool accept = false;
    double phi_p = 0.0;
    try {
      const PotentialValue v = potential(m_p);
      rec.counters += v.cost;
      rec.call_newton_iters.push_back(static_cast<int>(v.cost.newton_iters));
      phi_p = v.phi;
      if (!std::isfinite(phi_p)) throw Error("nonfinite potential");
      accept = std::exp(phi - phi_p) >= r;
    } catch (const Error& e) {
      if (const auto* pf = dynamic_cast<const PotentialFailure*>(&e)) {
        rec.counters += pf->cost;
        rec.call_newton_iters.push_back(static_cast<int>(pf->cost.newton_iters));
      } else {
        rec.counters.failures += 1;
        rec.call_newton_iters.push_back(0);
      }
      ++failures;
      std::clog << "warning: chain " << rec.stream << " step " << k << ": potential failed (" << e.what()
                << "), proposal rejected\n";
      if (failures > o.max_failures)
        throw Error("pcn: more than " + std::to_string(o.max_failures) + " failed potential evaluations");
    }
    if (accept) {
      m = m_p;
      phi = phi_p;
    }
    rec.potentials.push_back(phi);
    rec.accept_flags.push_back(accept ? 1 : 0);
    if ((k + 1) % o.thin == 0) rec.samples.push_back(m);
  }
  return rec;
}

std::vector<ChainRecord> run_chains(const std::function<PotentialFn(int)>& make_potential,
                                    const prior::BiLaplacianPrior& prior, const PcnOptions& options,
                                    int n_chains, std::uint64_t seed, const Vector& init, int jobs) {
  require(n_chains >= 1, "run_chains: need at least one chain");
  std::vector<ChainRecord> chains(static_cast<std::size_t>(n_chains));
  parallel_for(chains.size(), jobs, [&](std::size_t c, std::size_t) {
    RngStream rng(seed, c);
    chains[c] = pcn_sample(make_potential(static_cast<int>(c)), prior, options, rng, init);
  });
  return chains;
}

EvalCounters merge_counters(const std::vector<ChainRecord>& chains) {
  EvalCounters total;
  for (const auto& c : chains) total += c.counters;
  return total;
}

} // namespace opcorrect::bayes
