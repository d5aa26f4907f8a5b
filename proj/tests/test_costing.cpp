#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opcorrect/costing/ledger.hpp"
#include "opcorrect/surrogate/workflow.hpp"

#include <cmath>
#include <sstream>

using namespace opcorrect;
using namespace opcorrect::costing;

namespace {

CostCalibration fixed_calibration(double cost_no) {
  CostCalibration c;
  c.reps = 1;
  c.linear_solve_seconds = 1.0;
  c.surrogate_seconds = cost_no;
  return c;
}

CostLedger model_ledger(long steps, double newton_per_eval) {
  CostLedger l;
  l.label = "model";
  l.n_chain = steps;
  l.online.potential_evals = steps;
  l.online.forward_solves = steps;
  l.online.newton_iters = std::lround(newton_per_eval * static_cast<double>(steps));
  l.online.model_seconds = 2.0 * newton_per_eval * static_cast<double>(steps);
  return l;
}

CostLedger surrogate_ledger(long steps, bool corrected, long offline) {
  CostLedger l;
  l.label = corrected ? "ecno" : "no";
  l.n_chain = steps;
  l.offline_newton_iters = offline;
  l.online.potential_evals = steps;
  l.online.surrogate_evals = steps;
  l.online.surrogate_seconds = 0.001 * static_cast<double>(steps);
  if (corrected) {
    l.online.correction_solves = steps;
    l.online.correction_seconds = 2.0 * static_cast<double>(steps);
  }
  return l;
}

} // namespace

TEST_CASE("identical ledgers give unit speedup") {
  const CostLedger m = model_ledger(1000, 3.0);
  const ObservedSpeedup s = observed_speedup(m, m, fixed_calibration(0.01));
  CHECK(s.units == 1.0);
  CHECK(s.wall == 1.0);
}

TEST_CASE("observed speedup falls as offline cost grows") {
  const CostLedger m = model_ledger(40000, 3.3);
  const auto cal = fixed_calibration(0.01);
  double previous = std::numeric_limits<double>::infinity();
  for (long offline : {0L, 1000L, 10000L, 100000L, 1000000L}) {
    const double s = observed_speedup(m, surrogate_ledger(40000, true, offline), cal).units;
    CHECK(s < previous);
    previous = s;
  }
  CHECK(previous < 1.0);
  const double expected = 3.3 * 40000.0 / (40000.0 * 1.01 + 1000.0);
  CHECK(observed_speedup(m, surrogate_ledger(40000, true, 1000), cal).units == doctest::Approx(expected));
}

TEST_CASE("corrected asymptotic speedup approaches the mean Newton count") {
  const CostLedger m = model_ledger(10000, 2.5);
  const AsymptoticSpeedup a = asymptotic_speedup(m, surrogate_ledger(10000, true, 500), SpeedupMode::ecno,
                                                 fixed_calibration(1e-9));
  CHECK(a.cost_pde == doctest::Approx(2.5));
  CHECK(a.cost_ec == 1.0);
  CHECK(a.value == doctest::Approx(2.5).epsilon(1e-6));
  CHECK_FALSE(a.unbounded);
  CHECK(a.wall == doctest::Approx(5.0 / (0.001 + 2.0)));

  const AsymptoticSpeedup no = asymptotic_speedup(m, surrogate_ledger(10000, false, 500), SpeedupMode::no,
                                                  fixed_calibration(0.05));
  CHECK(no.value == doctest::Approx(50.0));

  const AsymptoticSpeedup free = asymptotic_speedup(m, surrogate_ledger(10000, false, 500), SpeedupMode::no,
                                                    fixed_calibration(0.0));
  CHECK(free.unbounded);
  CHECK(std::isinf(free.value));
  CHECK(std::isfinite(free.wall));
}

TEST_CASE("mean Newton count has a floor of one") {
  CostLedger l = model_ledger(10, 0.0);
  CHECK(mean_newton_iterations(l) == 1.0);
  CHECK(mean_newton_iterations(model_ledger(10, 4.0)) == 4.0);
  CHECK_THROWS_AS(mean_newton_iterations(CostLedger{}), InvalidArgument);
}

TEST_CASE("ledger validation") {
  const CostLedger m = model_ledger(100, 3.0);
  CHECK_THROWS_AS(observed_speedup(m, surrogate_ledger(99, true, 10), fixed_calibration(0.01)), InvalidArgument);
  CostLedger bad = m;
  bad.online.newton_iters = -1;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  CHECK_THROWS_AS(observed_speedup(m, m, CostCalibration{}), InvalidArgument);
  CHECK_THROWS_AS(asymptotic_speedup(m, surrogate_ledger(100, true, 0), SpeedupMode::ecno, CostCalibration{}),
                  InvalidArgument);
  CostLedger empty;
  empty.n_chain = 100;
  CHECK_THROWS_AS(observed_speedup(m, empty, fixed_calibration(0.01)), InvalidArgument);
  CHECK(parse_speedup_mode("ecno") == SpeedupMode::ecno);
  CHECK_THROWS_AS(parse_speedup_mode("fast"), InvalidArgument);

  CostLedger sum = m;
  sum += m;
  CHECK(sum.online.newton_iters == 2 * m.online.newton_iters);
  CHECK(sum.n_chain == 200);
}

TEST_CASE("chain counters are conserved in the ledger") {
  const fem::Mesh mesh = fem::build_unit_square_mesh(4, 4);
  const prior::BiLaplacianPrior prior(mesh, 0.08, 2.0, Vector::Zero(mesh.n_nodes()));
  bayes::PcnOptions o;
  o.beta = 0.3;
  o.n_steps = 200;
  auto make = [](int c) -> bayes::PotentialFn {
    auto calls = std::make_shared<int>(0);
    return [calls, c](const Vector& m) {
      bayes::PotentialValue v;
      v.phi = m.squaredNorm();
      v.cost.potential_evals = 1;
      v.cost.newton_iters = 2 + (c + (*calls)++) % 3;
      return v;
    };
  };
  const auto chains = bayes::run_chains(make, prior, o, 3, 5, prior.mean());
  const CostLedger l = ledger_from_chains("model", chains);
  long calls = 0;
  for (const auto& c : chains)
    for (int n : c.call_newton_iters) {
      calls += n;
    }
  CHECK(l.online.newton_iters == calls);
  CHECK(l.n_chain == 600);
  CHECK(l.online.potential_evals == 603);
}

TEST_CASE("calibration and report rows") {
  const fem::Mesh mesh = fem::build_unit_square_mesh(8, 8);
  const model::ReactionDiffusion model(mesh);
  const prior::BiLaplacianPrior prior(mesh, 0.08, 2.0, Vector::Zero(mesh.n_nodes()));
  RngStream rng(3);
  std::vector<Vector> ms, us;
  for (int j = 0; j < 16; ++j) {
    ms.push_back(prior.sample(rng).values);
    us.push_back(model.solve_forward(ms.back()).u.values);
  }
  surrogate::BasisOptions bo;
  bo.r_in = bo.r_out = 4;
  surrogate::NeuralOperator op;
  op.nx = op.ny = 8;
  op.basis = surrogate::build_reduced_basis(model, prior.mean(), ms, us, bo, rng).basis;
  op.net = surrogate::ResNet(4, 4, 4);
  const CostCalibration cal = calibrate_costs(model, op, ms[0], 20);
  CHECK(cal.valid());
  CHECK(cal.reps == 20);
  CHECK(cal.cost_no_units() > 0.0);

  const CostLedger m = model_ledger(1000, 3.0);
  const SpeedupRow row = speedup_row(m, surrogate_ledger(1000, true, 300), SpeedupMode::ecno, 128, cal);
  CHECK(row.n_train == 128);
  CHECK(row.offline_units == 300.0);
  std::ostringstream os;
  write_speedup_csv(os, {row});
  CHECK(os.str().rfind("mode,n_train,offline_units,online_units,observed,asymptotic,wall_observed\necno,128,300,", 0) ==
        0);
}
