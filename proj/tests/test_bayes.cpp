#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opcorrect/bayes/bounds.hpp"
#include "opcorrect/bayes/chain_io.hpp"
#include "opcorrect/bayes/posterior.hpp"
#include "opcorrect/bayes/truth.hpp"
#include "opcorrect/surrogate/workflow.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

using namespace opcorrect;
using namespace opcorrect::bayes;

namespace {

struct Desk {
  fem::Mesh mesh;
  model::ReactionDiffusion model;
  prior::BiLaplacianPrior prior;
  ObservationSetup obs;
  SyntheticData data;
  Vector m_star;
  surrogate::NeuralOperator op;

  explicit Desk(int n)
      : mesh(fem::build_unit_square_mesh(n, n)), model(mesh),
        prior(mesh, 0.08, 2.0, Vector::Zero(mesh.n_nodes())),
        obs(build_observation_adjusting(mesh, model.space().lumped_mass(), 10, 0.04)),
        m_star(rosenbrock_truth(mesh)) {
    RngStream rng(2024);
    data = make_synthetic_data(obs, model, m_star, 0.01, rng);
    obs.sigma = data.sigma;
  }

  void train(int n_train) {
    RngStream rng(8);
    std::vector<Vector> ms, us;
    for (int j = 0; j < n_train; ++j) {
      ms.push_back(prior.sample(rng).values);
      us.push_back(model.solve_forward(ms.back()).u.values);
    }
    surrogate::BasisOptions bo;
    bo.r_in = bo.r_out = 10;
    bo.n_basis_samples = 16;
    op.nx = op.ny = mesh.nx;
    op.basis = surrogate::build_reduced_basis(model, prior.mean(), ms, us, bo, rng).basis;
    surrogate::TrainingOptions o;
    o.epochs = o.final_epochs = 20;
    o.max_layers = 4;
    o.seed = 3;
    op.net = surrogate::train_adaptive(surrogate::make_training_set(op.basis, ms, us), o).net;
  }
};

Desk& trained_desk() {
  static Desk d = [] {
    Desk x(16);
    x.train(128);
    return x;
  }();
  return d;
}

PotentialFn zero_potential() {
  return [](const Vector&) { return PotentialValue{}; };
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double lag1_autocorrelation(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double c0 = 0.0, c1 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    c0 += (x[i] - mean) * (x[i] - mean);
    if (i + 1 < x.size()) c1 += (x[i] - mean) * (x[i + 1] - mean);
  }
  return c1 / c0;
}

} // namespace

TEST_CASE("observation operator averages locally") {
  const fem::Mesh mesh = fem::build_unit_square_mesh(32, 32);
  const fem::P1Space space(mesh);
  const ObservationSetup obs = build_observation(mesh, space.lumped_mass(), 10, 0.04);
  CHECK(obs.n_y() == 100);
  CHECK(obs.points.size() == 100);
  CHECK(obs.points[11].x == doctest::Approx(0.15));
  CHECK(obs.points[11].y == doctest::Approx(0.15));
  CHECK((obs.B.array() >= 0.0).all());
  CHECK((obs.B.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);

  const Vector c = Vector::Constant(mesh.n_nodes(), 2.5);
  CHECK((obs.observe(c).array() - 2.5).abs().maxCoeff() <= 1e-12);
  const Vector y = fem::interpolate(mesh, [](double, double yy) { return yy; });
  const Vector oy = obs.observe(y);
  for (int k = 0; k < obs.n_y(); ++k) CHECK(std::abs(oy[k] - obs.points[static_cast<std::size_t>(k)].y) <= obs.radius);

  CHECK_NOTHROW(build_observation(mesh, space.lumped_mass(), 10, 0.02));
  CHECK_THROWS_AS(obs.observe(Vector::Zero(5)), InvalidArgument);
}

TEST_CASE("empty observation discs are rejected or grown") {
  const fem::Mesh mesh = fem::build_unit_square_mesh(4, 4);
  const fem::P1Space space(mesh);
  CHECK_THROWS_AS(build_observation(mesh, space.lumped_mass(), 10, 0.01), InvalidArgument);
  CHECK_THROWS_AS(build_observation(mesh, space.lumped_mass(), 10, 0.0), InvalidArgument);
  const ObservationSetup grown = build_observation_adjusting(mesh, space.lumped_mass(), 10, 0.01);
  CHECK(grown.requested_radius == 0.01);
  CHECK(grown.radius > 0.01);
  CHECK((grown.B.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
  // The previous radius must still leave a disc empty.
  CHECK_THROWS_AS(build_observation(mesh, space.lumped_mass(), 10, grown.radius / 1.5), InvalidArgument);
}

TEST_CASE("truth field") {
  CHECK(rosenbrock_truth(0.75, 0.5) == doctest::Approx(1.0));
  CHECK(rosenbrock_truth(0.0, 0.0) == doctest::Approx(1.5 * std::exp(-(9.0 + 100.0 * 25.0) / 25.0) - 0.5));
  const Vector m = rosenbrock_truth(fem::build_unit_square_mesh(32, 32));
  CHECK(m.minCoeff() >= -0.5);
  CHECK(m.maxCoeff() <= 1.0);
  CHECK(truth_formula().find("1.5") != std::string::npos);
}

TEST_CASE("synthetic data follows the noise rule") {
  Desk d(16);
  RngStream a(5), b(5);
  const SyntheticData s1 = make_synthetic_data(d.obs, d.model, d.m_star, 0.01, a);
  const SyntheticData s2 = make_synthetic_data(d.obs, d.model, d.m_star, 0.01, b);
  CHECK(s1.y_star == s2.y_star);
  CHECK(s1.sigma == doctest::Approx(0.01 * s1.clean.cwiseAbs().maxCoeff()));
  RngStream c(6);
  const SyntheticData tiny = make_synthetic_data(d.obs, d.model, d.m_star, 1e-12, c);
  CHECK((tiny.y_star - tiny.clean).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK_THROWS_AS(make_synthetic_data(d.obs, d.model, d.m_star, 0.0, c), InvalidArgument);
}

TEST_CASE("model potential") {
  Desk d(16);
  const Potential phi(d.model, d.obs, d.data.y_star, StateMap::model);
  const PotentialValue at_truth = phi(d.m_star);
  INFO("Phi(m*) = " << at_truth.phi);
  CHECK(at_truth.phi >= 25.0);
  CHECK(at_truth.phi <= 75.0);
  CHECK(at_truth.cost.potential_evals == 1);
  CHECK(at_truth.cost.forward_solves == 1);
  CHECK(at_truth.cost.newton_iters == d.model.solve_forward(d.m_star).newton_iters);

  RngStream rng(3);
  const Vector m = d.prior.sample(rng).values;
  const Vector exact = d.obs.observe(d.model.solve_forward(m).u.values);
  const Potential clean(d.model, d.obs, exact, StateMap::model);
  CHECK(clean(m).phi == 0.0);

  CHECK_THROWS_AS(Potential(d.model, d.obs, d.data.y_star, StateMap::surrogate), InvalidArgument);
  CHECK_THROWS_AS(Potential(d.model, d.obs, Vector::Zero(3), StateMap::model), InvalidArgument);
  CHECK(parse_state_map("ecno") == StateMap::corrected);
  CHECK(to_string(StateMap::surrogate) == "no");
  CHECK_THROWS_AS(parse_state_map("fast"), InvalidArgument);
}

TEST_CASE("corrected potential tracks the model potential") {
  Desk& d = trained_desk();
  const Potential model_phi(d.model, d.obs, d.data.y_star, StateMap::model);
  const Potential raw_phi(d.model, d.obs, d.data.y_star, StateMap::surrogate, &d.op);
  const Potential corr_phi(d.model, d.obs, d.data.y_star, StateMap::corrected, &d.op);

  RngStream rng(77);
  int closer = 0;
  std::vector<double> gap_raw, gap_corr;
  for (int s = 0; s < 20; ++s) {
    const Vector m = d.prior.sample(rng).values;
    const double p = model_phi(m).phi;
    const PotentialValue r = raw_phi(m);
    const PotentialValue c = corr_phi(m);
    CHECK(r.cost.surrogate_evals == 1);
    CHECK(r.cost.linear_solves() == 0);
    CHECK(c.cost.surrogate_evals == 1);
    CHECK(c.cost.correction_solves == 1);
    gap_raw.push_back(std::abs(r.phi - p));
    gap_corr.push_back(std::abs(c.phi - p));
    if (gap_corr.back() <= gap_raw.back()) ++closer;
  }
  INFO("median gaps raw " << median(gap_raw) << " corrected " << median(gap_corr));
  CHECK(closer >= 18);
  CHECK(median(gap_corr) <= 0.1 * median(gap_raw));
}

TEST_CASE("pCN with a flat potential samples the prior") {
  const fem::Mesh mesh = fem::build_unit_square_mesh(16, 16);
  const prior::BiLaplacianPrior prior(mesh, 0.08, 2.0, Vector::Zero(mesh.n_nodes()));
  PcnOptions o;
  o.beta = 0.8;
  o.n_steps = 5000;
  RngStream rng(11);
  const ChainRecord c = pcn_sample(zero_potential(), prior, o, rng, prior.mean());
  CHECK(c.acceptance_rate() == 1.0);
  CHECK(c.samples.size() == 5000);

  const int center = mesh.node_index(8, 8);
  std::vector<double> trace;
  double sum = 0.0, sumsq = 0.0;
  for (const auto& s : c.samples) {
    trace.push_back(s[center]);
    sum += s[center];
    sumsq += s[center] * s[center];
  }
  const double rho = lag1_autocorrelation(trace);
  INFO("lag-1 autocorrelation " << rho);
  CHECK(std::abs(rho - std::sqrt(1.0 - o.beta * o.beta)) <= 0.05);

  RngStream srng(12);
  const double prior_var = prior::estimate_pointwise_stats(prior, 2000, srng).variance.values[center];
  const double chain_var = sumsq / 5000.0 - (sum / 5000.0) * (sum / 5000.0);
  INFO("chain variance " << chain_var << " prior variance " << prior_var);
  CHECK(std::abs(chain_var - prior_var) <= 0.15 * prior_var);
}

TEST_CASE("pCN contracts toward a nonzero prior mean") {
  const fem::Mesh mesh = fem::build_unit_square_mesh(8, 8);
  const prior::BiLaplacianPrior prior(mesh, 0.08, 2.0, Vector::Constant(mesh.n_nodes(), 0.37));
  PcnOptions o;
  o.beta = 0.8;
  o.n_steps = 4000;
  o.thin = 2;
  RngStream rng(21);
  const ChainRecord c = pcn_sample(zero_potential(), prior, o, rng, Vector::Constant(mesh.n_nodes(), 3.0));
  CHECK(c.samples.size() == 2000);
  const Vector mean = posterior_mean({c}, 0.25, Transform::identity);
  const int center = mesh.node_index(4, 4);
  double var = 0.0;
  for (const auto& s : c.samples) var += (s[center] - 0.37) * (s[center] - 0.37);
  var /= static_cast<double>(c.samples.size());
  // Thinned by 2 the AR(1) coefficient is 1 - beta^2 = 0.36; ess = n (1 - rho) / (1 + rho).
  const double ess = 1500.0 * (1.0 - 0.36) / (1.0 + 0.36);
  CHECK(std::abs(mean[center] - 0.37) <= 4.0 * std::sqrt(var / ess));
}

TEST_CASE("acceptance follows the potential-difference rule") {
  const fem::Mesh mesh = fem::build_unit_square_mesh(4, 4);
  const prior::BiLaplacianPrior prior(mesh, 0.08, 2.0, Vector::Zero(mesh.n_nodes()));
  PcnOptions o;
  o.beta = 0.2;
  o.n_steps = 400;

  SUBCASE("decreasing potential is always accepted") {
    int calls = 0;
    PotentialFn down = [&](const Vector&) { return PotentialValue{100.0 - calls++, {}}; };
    RngStream rng(1);
    CHECK(pcn_sample(down, prior, o, rng, prior.mean()).acceptance_rate() == 1.0);
  }
  SUBCASE("random potentials against a replayed stream") {
    std::vector<double> values;
    RngStream vals(99);
    for (int k = 0; k <= o.n_steps; ++k) values.push_back(3.0 * vals.uniform());
    int calls = 0;
    PotentialFn f = [&](const Vector&) { return PotentialValue{values[static_cast<std::size_t>(calls++)], {}}; };
    RngStream rng(4), replay(4);
    const ChainRecord c = pcn_sample(f, prior, o, rng, prior.mean());
    double cur = values[0];
    int mismatches = 0, accepted = 0;
    for (int k = 0; k < o.n_steps; ++k) {
      replay.normal_vector(prior.dim());
      const double r = replay.uniform();
      const double prop = values[static_cast<std::size_t>(k + 1)];
      const bool acc = std::exp(cur - prop) >= r;
      if (acc) {
        cur = prop;
        ++accepted;
      }
      if (acc != bool(c.accept_flags[static_cast<std::size_t>(k)])) ++mismatches;
      if (c.potentials[static_cast<std::size_t>(k)] != cur) ++mismatches;
    }
    CHECK(mismatches == 0);
    CHECK(accepted > 0);
    CHECK(accepted < o.n_steps);
  }
}

TEST_CASE("pCN validation, failures, and determinism") {
  const fem::Mesh mesh = fem::build_unit_square_mesh(4, 4);
  const prior::BiLaplacianPrior prior(mesh, 0.08, 2.0, Vector::Zero(mesh.n_nodes()));
  PcnOptions o;
  o.n_steps = 100;
  o.thin = 10;
  RngStream rng(1);
  for (double bad : {0.0, 1.0, -0.1}) {
    PcnOptions b = o;
    b.beta = bad;
    CHECK_THROWS_AS(pcn_sample(zero_potential(), prior, b, rng, prior.mean()), InvalidArgument);
  }
  PcnOptions ragged = o;
  ragged.n_steps = 105;
  CHECK_THROWS_AS(pcn_sample(zero_potential(), prior, ragged, rng, prior.mean()), InvalidArgument);

  int calls = 0;
  PotentialFn flaky = [&](const Vector&) -> PotentialValue {
    if (++calls % 20 == 0) throw Error("solver failed");
    return {};
  };
  RngStream r1(2);
  const ChainRecord c = pcn_sample(flaky, prior, o, r1, prior.mean());
  CHECK(c.counters.failures == 5);
  CHECK(c.acceptance_rate() == doctest::Approx(0.95));
  CHECK(c.samples.size() == 10);

  PotentialFn broken = [&](const Vector&) -> PotentialValue {
    if (++calls > 1) throw Error("solver failed");
    return {};
  };
  calls = 0;
  RngStream r2(2);
  CHECK_THROWS_AS(pcn_sample(broken, prior, o, r2, prior.mean()), Error);

  RngStream a(9, 1), b(9, 1);
  CHECK(pcn_sample(zero_potential(), prior, o, a, prior.mean()).samples ==
        pcn_sample(zero_potential(), prior, o, b, prior.mean()).samples);
}

TEST_CASE("model-potential chain on the desk problem") {
  Desk d(16);
  const Potential phi(d.model, d.obs, d.data.y_star, StateMap::model);
  PcnOptions o;
  o.beta = 0.03;
  o.n_steps = 1000;
  o.thin = 10;
  const auto chains = run_chains([&](int) { return phi.function(); }, d.prior, o, 2, 17, d.prior.mean(), 2);
  const auto serial = run_chains([&](int) { return phi.function(); }, d.prior, o, 2, 17, d.prior.mean(), 1);
  for (const auto& c : chains) {
    INFO("acceptance " << c.acceptance_rate());
    CHECK(c.acceptance_rate() >= 0.05);
    CHECK(c.acceptance_rate() <= 0.6);
    long newton = 0;
    for (int n : c.call_newton_iters) newton += n;
    CHECK(newton == c.counters.newton_iters);
    CHECK(c.counters.potential_evals == o.n_steps + 1);
  }
  CHECK(chains[0].samples == serial[0].samples);
  CHECK(chains[1].potentials == serial[1].potentials);
  CHECK(chains[0].potentials != chains[1].potentials);
  const EvalCounters total = merge_counters(chains);
  CHECK(total.newton_iters == chains[0].counters.newton_iters + chains[1].counters.newton_iters);
}

TEST_CASE("posterior means") {
  ChainRecord c;
  const Vector m0 = Vector::LinSpaced(5, -1.0, 1.0);
  c.samples.assign(10, m0);
  CHECK((posterior_mean({c}, 0.0, Transform::exp) - m0.array().exp().matrix()).norm() <= 1e-14);
  CHECK((posterior_mean({c}, 0.5, Transform::exp_plus_1) - (m0.array().exp() + 1.0).matrix()).norm() <= 1e-14);

  ChainRecord ramp;
  for (int i = 0; i < 8; ++i) ramp.samples.push_back(Vector::Constant(1, i));
  CHECK(posterior_mean({ramp}, 0.25, Transform::identity)[0] == doctest::Approx(4.5));

  ChainRecord big;
  big.samples.assign(15000, Vector::Zero(1));
  std::vector<ChainRecord> eight(8, big);
  int used = 0;
  for (const auto& ch : eight) used += post_burn_in_count(ch, 0.25);
  CHECK(used == 90000);

  CHECK_THROWS_AS(posterior_mean({ChainRecord{}}, 0.0, Transform::exp), InvalidArgument);
  CHECK_THROWS_AS(posterior_mean({c}, 1.0, Transform::exp), InvalidArgument);
  CHECK(parse_transform("exp_plus_1") == Transform::exp_plus_1);
  CHECK_THROWS_AS(parse_transform("log"), InvalidArgument);
}

TEST_CASE("chain files round trip byte for byte") {
  const fem::Mesh mesh = fem::build_unit_square_mesh(4, 4);
  const prior::BiLaplacianPrior prior(mesh, 0.08, 2.0, Vector::Zero(mesh.n_nodes()));
  int calls = 0;
  PotentialFn f = [&](const Vector&) { return PotentialValue{std::sin(calls++) + 1.0, {}}; };
  PcnOptions o;
  o.beta = 0.4;
  o.n_steps = 60;
  o.thin = 3;
  RngStream rng(31);
  const ChainRecord c = pcn_sample(f, prior, o, rng, prior.mean());

  std::stringstream first;
  write_chain(first, 4, 4, c);
  const std::string bytes = first.str();
  CHECK(bytes.rfind("CHAIN v1 20 3 0.40000000000000002 31\n", 0) == 0);
  const ChainRecord back = read_chain(first);
  CHECK(back.samples == c.samples);
  CHECK(back.potentials == c.potentials);
  CHECK(back.accept_flags == c.accept_flags);
  CHECK(back.beta == c.beta);
  std::stringstream second;
  write_chain(second, 4, 4, back);
  CHECK(second.str() == bytes);

  std::stringstream truncated(bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_AS(read_chain(truncated), Error);
  std::stringstream junk("CHAIN v2 1 1 0.5 1\n");
  CHECK_THROWS_AS(read_chain(junk), Error);

  std::ostringstream csv;
  write_chain_metrics(csv, {c});
  const std::string text = csv.str();
  CHECK(text.rfind("chain,step,phi,accepted\n0,0,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 61);
}

TEST_CASE("KL estimator") {
  RngStream rng(4);
  std::vector<double> phi, same, other;
  for (int i = 0; i < 300; ++i) {
    phi.push_back(2.0 + rng.normal() * 0.5);
    same.push_back(phi.back());
    other.push_back(phi.back() + 0.3 * rng.normal());
  }
  const KlEstimate zero = kl_from_potentials(phi, same);
  CHECK(zero.value == 0.0);
  const KlEstimate k = kl_from_potentials(phi, other);
  CHECK(k.value >= -3.0 * k.standard_error);
  CHECK(k.standard_error > 0.0);
  CHECK(k.reliable);

  // Exact KL between two reweightings of a two-point prior.
  const std::vector<double> a{0.0, 1.0}, b{0.5, 0.2};
  const double za = 0.5 * (1.0 + std::exp(-1.0)), zb = 0.5 * (std::exp(-0.5) + std::exp(-0.2));
  const double pb0 = 0.5 * std::exp(-0.5) / zb, pb1 = 0.5 * std::exp(-0.2) / zb;
  const double pa0 = 0.5 / za, pa1 = 0.5 * std::exp(-1.0) / za;
  const double exact = pb0 * std::log(pb0 / pa0) + pb1 * std::log(pb1 / pa1);
  CHECK(kl_from_potentials(a, b).value == doctest::Approx(exact).epsilon(1e-12));

  std::vector<double> spiky(50, 40.0);
  spiky[0] = 0.0;
  CHECK_FALSE(kl_from_potentials(spiky, spiky).reliable);
  CHECK_THROWS_AS(kl_from_potentials({1.0}, {1.0}), InvalidArgument);
}

TEST_CASE("bound constants") {
  Desk& d = trained_desk();
  const StateFn model_map = [&](const Vector& m) { return d.model.solve_forward(m).u.values; };
  const StateFn no_map = [&](const Vector& m) { return d.op.predict(m); };

  RngStream r0(1);
  const BoundConstants same = estimate_bound_constants(d.obs, d.data.y_star, model_map, model_map, d.prior,
                                                       d.model.mass(), 100, r0);
  CHECK(same.E_norm == 0.0);
  CHECK(same.bound_value == 0.0);
  CHECK(same.kl_estimate == 0.0);
  CHECK(same.skipped_L == 100);

  RngStream r1(2);
  const BoundSamples s = draw_bound_samples(d.obs, d.data.y_star, model_map, no_map, d.prior, 100, r1, 2);
  const BoundConstants b = bound_constants_from_samples(d.obs, d.data.y_star, d.model.mass(), s);
  CHECK(b.c3 >= 1.0);
  CHECK(b.c3 <= b.c2_1);
  CHECK(b.c2_1 / b.c2_q == doctest::Approx(b.c3));
  CHECK(b.bound_value == doctest::Approx(b.c1 * (b.c2_1 + b.c3) * b.c_L * b.E_norm));
  CHECK(b.c_B > 0.0);
  CHECK(b.c_B_tilde > 0.0);

  ObservationSetup sharp = d.obs;
  sharp.sigma /= 10.0;
  CHECK(bound_constants_from_samples(sharp, d.data.y_star, d.model.mass(), s).c1 > b.c1);

  CHECK_THROWS_AS(estimate_bound_constants(d.obs, d.data.y_star, model_map, no_map, d.prior, d.model.mass(), 50, r1),
                  InvalidArgument);
}

TEST_CASE("bound holds in the weak-data regime") {
  Desk& d = trained_desk();
  ObservationSetup weak = d.obs;
  weak.sigma *= 100.0;
  const StateFn model_map = [&](const Vector& m) { return d.model.solve_forward(m).u.values; };
  const StateFn no_map = [&](const Vector& m) { return d.op.predict(m); };
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    RngStream rng(seed);
    const BoundConstants b =
        estimate_bound_constants(weak, d.data.y_star, model_map, no_map, d.prior, d.model.mass(), 100, rng);
    INFO("seed " << seed << " kl " << b.kl_estimate << " +- " << b.kl.standard_error << " bound " << b.bound_value);
    CHECK(b.kl_estimate <= b.bound_value);
    CHECK(b.kl_estimate >= -3.0 * b.kl.standard_error);
    CHECK(b.c3 >= 1.0);
    CHECK(b.c3 <= b.c2_1);
  }
}
