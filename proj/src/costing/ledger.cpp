#include "opcorrect/costing/ledger.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace opcorrect::costing {

void CostLedger::validate() const {
  const auto& o = online;
  require(n_chain >= 0 && offline_newton_iters >= 0 && offline_derivative_solves >= 0 && offline_seconds >= 0.0 &&
              training_seconds >= 0.0,
          "cost ledger '" + label + "': offline counters must be nonnegative");
  require(o.potential_evals >= 0 && o.forward_solves >= 0 && o.newton_iters >= 0 && o.correction_solves >= 0 &&
              o.surrogate_evals >= 0 && o.failures >= 0,
          "cost ledger '" + label + "': online counters must be nonnegative");
}

double CostLedger::offline_units() const {
  return static_cast<double>(offline_newton_iters + offline_derivative_solves);
}

double CostLedger::online_units(double cost_no_units) const {
  return static_cast<double>(online.newton_iters + online.correction_solves) +
         static_cast<double>(online.surrogate_evals) * cost_no_units;
}

double CostLedger::online_seconds() const {
  return online.model_seconds + online.surrogate_seconds + online.correction_seconds;
}

CostLedger& CostLedger::operator+=(const CostLedger& o) {
  n_chain += o.n_chain;
  offline_newton_iters += o.offline_newton_iters;
  offline_derivative_solves += o.offline_derivative_solves;
  offline_seconds += o.offline_seconds;
  training_seconds += o.training_seconds;
  online += o.online;
  return *this;
}

CostLedger ledger_from_chains(std::string label, const std::vector<bayes::ChainRecord>& chains) {
  CostLedger l;
  l.label = std::move(label);
  for (const auto& c : chains) l.n_chain += c.n_steps();
  l.online = bayes::merge_counters(chains);
  return l;
}

double CostCalibration::cost_no_units() const {
  require(valid(), "cost calibration missing");
  return surrogate_seconds / linear_solve_seconds;
}

CostCalibration calibrate_costs(const model::ReactionDiffusion& model, const surrogate::NeuralOperator& op,
                                const Vector& m, int reps) {
  require(reps >= 1, "calibrate_costs: reps must be positive");
  using clock = std::chrono::steady_clock;
  const Vector u = op.predict(m);
  CostCalibration c;
  c.reps = reps;
  double sink = 0.0;
  auto t0 = clock::now();
  for (int i = 0; i < reps; ++i) sink += model.error_correct(u, m).u.values[0];
  c.linear_solve_seconds = std::chrono::duration<double>(clock::now() - t0).count() / reps;
  t0 = clock::now();
  for (int i = 0; i < reps; ++i) sink += op.predict(m)[0];
  c.surrogate_seconds = std::chrono::duration<double>(clock::now() - t0).count() / reps;
  if (!std::isfinite(sink)) throw Error("calibrate_costs: nonfinite evaluation");
  return c;
}

namespace {

double safe_ratio(double num, double den, const char* what) {
  if (!(den > 0.0)) throw InvalidArgument(std::string("speedup: zero ") + what);
  return num / den;
}

} // namespace

ObservedSpeedup observed_speedup(const CostLedger& model_ledger, const CostLedger& surrogate_ledger,
                                 const CostCalibration& calibration) {
  model_ledger.validate();
  surrogate_ledger.validate();
  require(model_ledger.n_chain == surrogate_ledger.n_chain, "observed_speedup: ledgers cover different chain lengths");
  const double cno = calibration.cost_no_units();
  ObservedSpeedup s;
  s.units = safe_ratio(model_ledger.online_units(cno),
                       surrogate_ledger.online_units(cno) + surrogate_ledger.offline_units(), "surrogate cost");
  const double sur_wall = surrogate_ledger.online_seconds() + surrogate_ledger.offline_seconds;
  s.wall = sur_wall > 0.0 ? model_ledger.online_seconds() / sur_wall : std::numeric_limits<double>::quiet_NaN();
  return s;
}

SpeedupMode parse_speedup_mode(const std::string& text) {
  if (text == "no") return SpeedupMode::no;
  if (text == "ecno") return SpeedupMode::ecno;
  throw InvalidArgument("unknown speedup mode '" + text + "' (expected no or ecno)");
}

std::string to_string(SpeedupMode mode) { return mode == SpeedupMode::no ? "no" : "ecno"; }

double mean_newton_iterations(const CostLedger& l) {
  require(l.online.potential_evals > 0, "mean_newton_iterations: no potential evaluations");
  return std::max(1.0, static_cast<double>(l.online.newton_iters) / static_cast<double>(l.online.potential_evals));
}

AsymptoticSpeedup asymptotic_speedup(const CostLedger& model_ledger, const CostLedger& surrogate_ledger,
                                     SpeedupMode mode, const CostCalibration& calibration) {
  model_ledger.validate();
  surrogate_ledger.validate();
  require(surrogate_ledger.online.potential_evals > 0, "asymptotic_speedup: surrogate ledger is empty");
  AsymptoticSpeedup a;
  a.cost_pde = mean_newton_iterations(model_ledger);
  a.cost_no = calibration.cost_no_units();
  const double evals = static_cast<double>(surrogate_ledger.online.potential_evals);
  a.cost_ec = mode == SpeedupMode::ecno ? static_cast<double>(surrogate_ledger.online.correction_solves) / evals : 0.0;

  const double pde_wall = model_ledger.online.model_seconds / static_cast<double>(model_ledger.online.potential_evals);
  const double sur_wall = (surrogate_ledger.online.surrogate_seconds +
                           (mode == SpeedupMode::ecno ? surrogate_ledger.online.correction_seconds : 0.0)) /
                          evals;
  a.wall = sur_wall > 0.0 ? pde_wall / sur_wall : std::numeric_limits<double>::infinity();

  const double den = a.cost_no + a.cost_ec;
  if (den <= 0.0) {
    a.unbounded = true;
    a.value = std::numeric_limits<double>::infinity();
  } else {
    a.value = a.cost_pde / den;
  }
  return a;
}

SpeedupRow speedup_row(const CostLedger& model_ledger, const CostLedger& surrogate_ledger, SpeedupMode mode,
                       int n_train, const CostCalibration& calibration) {
  SpeedupRow r;
  r.mode = mode;
  r.n_train = n_train;
  r.offline_units = surrogate_ledger.offline_units();
  r.online_units = surrogate_ledger.online_units(calibration.cost_no_units());
  const ObservedSpeedup o = observed_speedup(model_ledger, surrogate_ledger, calibration);
  r.observed = o.units;
  r.wall_observed = o.wall;
  r.asymptotic = asymptotic_speedup(model_ledger, surrogate_ledger, mode, calibration).value;
  return r;
}

void write_speedup_csv(std::ostream& os, const std::vector<SpeedupRow>& rows) {
  os << "mode,n_train,offline_units,online_units,observed,asymptotic,wall_observed\n" << std::setprecision(10);
  for (const auto& r : rows)
    os << to_string(r.mode) << ',' << r.n_train << ',' << r.offline_units << ',' << r.online_units << ','
       << r.observed << ',' << r.asymptotic << ',' << r.wall_observed << '\n';
}

} // namespace opcorrect::costing
