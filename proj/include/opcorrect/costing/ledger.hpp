#pragma once

#include "opcorrect/bayes/pcn.hpp"
#include "opcorrect/model/reaction_diffusion.hpp"
#include "opcorrect/surrogate/neural_operator.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace opcorrect::costing {

/// Work of one sampling campaign. Cost unit: one CG-solved linear system at
/// the forward-model sparsity.
struct CostLedger {
  std::string label;
  /// Total MCMC steps over all chains.
  long n_chain = 0;
  long offline_newton_iters = 0;      // training-data forward solves
  long offline_derivative_solves = 0; // derivative-basis linearized solves
  double offline_seconds = 0.0;
  double training_seconds = 0.0;
  bayes::EvalCounters online;

  void validate() const;
  double offline_units() const;
  /// Newton iterations + correction solves + surrogate evaluations * cost_no_units.
  double online_units(double cost_no_units) const;
  double online_seconds() const;
  CostLedger& operator+=(const CostLedger& o);
};

/// Online part filled from merged chain counters.
CostLedger ledger_from_chains(std::string label, const std::vector<bayes::ChainRecord>& chains);

/// Wall-clock calibration of a surrogate evaluation against one linearized solve.
struct CostCalibration {
  double linear_solve_seconds = 0.0;
  double surrogate_seconds = 0.0;
  int reps = 0;

  bool valid() const { return reps > 0 && linear_solve_seconds > 0.0; }
  /// Cost_NO in linear-solve units.
  double cost_no_units() const;
};

/// Times `reps` error-correction solves and surrogate evaluations at m.
CostCalibration calibrate_costs(const model::ReactionDiffusion& model, const surrogate::NeuralOperator& op,
                                const Vector& m, int reps = 100);

struct ObservedSpeedup {
  double units = 0.0;
  double wall = 0.0;
};

/// model online cost / (surrogate online + offline cost), in cost units and in wall time.
ObservedSpeedup observed_speedup(const CostLedger& model_ledger, const CostLedger& surrogate_ledger,
                                 const CostCalibration& calibration);

enum class SpeedupMode { no, ecno };
SpeedupMode parse_speedup_mode(const std::string& text);
std::string to_string(SpeedupMode mode);

struct AsymptoticSpeedup {
  double value = 0.0;
  /// Per-evaluation wall-time ratio.
  double wall = 0.0;
  /// Cost_NO rounds to zero units and mode == no.
  bool unbounded = false;
  double cost_pde = 0.0;
  double cost_no = 0.0;
  double cost_ec = 0.0;
};

/// Cost_PDE / Cost_NO (mode no) or Cost_PDE / (Cost_NO + Cost_EC) (mode ecno),
/// with Cost_PDE the mean Newton count per model potential evaluation.
AsymptoticSpeedup asymptotic_speedup(const CostLedger& model_ledger, const CostLedger& surrogate_ledger,
                                     SpeedupMode mode, const CostCalibration& calibration);

/// Mean Newton iterations per potential evaluation, at least 1.
double mean_newton_iterations(const CostLedger& model_ledger);

struct SpeedupRow {
  SpeedupMode mode = SpeedupMode::no;
  int n_train = 0;
  double offline_units = 0.0;
  double online_units = 0.0;
  double observed = 0.0;
  double asymptotic = 0.0;
  double wall_observed = 0.0;
};

SpeedupRow speedup_row(const CostLedger& model_ledger, const CostLedger& surrogate_ledger, SpeedupMode mode,
                       int n_train, const CostCalibration& calibration);

/// CSV "mode,n_train,offline_units,online_units,observed,asymptotic,wall_observed".
void write_speedup_csv(std::ostream& os, const std::vector<SpeedupRow>& rows);

} // namespace opcorrect::costing
