#pragma once

#include "opcorrect/bayes/observation.hpp"
#include "opcorrect/model/reaction_diffusion.hpp"
#include "opcorrect/surrogate/neural_operator.hpp"

#include <functional>
#include <string>

namespace opcorrect::bayes {

enum class StateMap { model, surrogate, corrected };
StateMap parse_state_map(const std::string& text);
/// "model", "no", "ecno".
std::string to_string(StateMap map);

/// Work done by state-map evaluations. Cost unit: one CG-solved linear system.
struct EvalCounters {
  long potential_evals = 0;
  long forward_solves = 0;
  long newton_iters = 0;
  long correction_solves = 0;
  long surrogate_evals = 0;
  long failures = 0;
  double model_seconds = 0.0;
  double surrogate_seconds = 0.0;
  double correction_seconds = 0.0;

  long linear_solves() const { return newton_iters + correction_solves; }
  EvalCounters& operator+=(const EvalCounters& o);
};

struct PotentialValue {
  double phi = 0.0;
  EvalCounters cost;
};

/// A failed state-map evaluation, carrying the work spent before the failure.
class PotentialFailure : public Error {
public:
  PotentialFailure(const std::string& what, EvalCounters cost) : Error(what), cost(cost) {}
  EvalCounters cost;
};

using PotentialFn = std::function<PotentialValue(const Vector&)>;

/// 0.5 ||y* - B u||^2 / sigma^2.
double misfit_potential(const ObservationSetup& obs, const Vector& y_star, const Vector& u);

/// Phi(m) with the state from a full Newton solve, the neural operator, or the
/// neural operator followed by one error-correction solve. The operator must
/// outlive this object and have its basis bound.
class Potential {
public:
  Potential(const model::ReactionDiffusion& model, const ObservationSetup& obs, Vector y_star, StateMap map,
            const surrogate::NeuralOperator* op = nullptr);

  StateMap map() const { return map_; }
  const Vector& y_star() const { return y_star_; }
  const ObservationSetup& observation() const { return *obs_; }

  Vector state(const Vector& m, EvalCounters& cost) const;
  PotentialValue operator()(const Vector& m) const;
  PotentialFn function() const;

private:
  const model::ReactionDiffusion* model_;
  const ObservationSetup* obs_;
  Vector y_star_;
  StateMap map_;
  const surrogate::NeuralOperator* op_;
};

} // namespace opcorrect::bayes
