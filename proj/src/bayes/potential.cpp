#include "opcorrect/bayes/potential.hpp"

#include <chrono>

namespace opcorrect::bayes {

StateMap parse_state_map(const std::string& text) {
  if (text == "model") return StateMap::model;
  if (text == "no" || text == "surrogate") return StateMap::surrogate;
  if (text == "ecno" || text == "corrected") return StateMap::corrected;
  throw InvalidArgument("unknown state map '" + text + "' (expected model, no or ecno)");
}

std::string to_string(StateMap map) {
  switch (map) {
  case StateMap::model: return "model";
  case StateMap::surrogate: return "no";
  case StateMap::corrected: return "ecno";
  }
  return "?";
}

EvalCounters& EvalCounters::operator+=(const EvalCounters& o) {
  potential_evals += o.potential_evals;
  forward_solves += o.forward_solves;
  newton_iters += o.newton_iters;
  correction_solves += o.correction_solves;
  surrogate_evals += o.surrogate_evals;
  failures += o.failures;
  model_seconds += o.model_seconds;
  surrogate_seconds += o.surrogate_seconds;
  correction_seconds += o.correction_seconds;
  return *this;
}

double misfit_potential(const ObservationSetup& obs, const Vector& y_star, const Vector& u) {
  require(y_star.size() == obs.n_y(), "potential: data length does not match the observation operator");
  require(obs.sigma > 0.0, "potential: noise level must be positive");
  const Vector r = y_star - obs.observe(u);
  return 0.5 * r.squaredNorm() / (obs.sigma * obs.sigma);
}

Potential::Potential(const model::ReactionDiffusion& model, const ObservationSetup& obs, Vector y_star,
                     StateMap map, const surrogate::NeuralOperator* op)
    : model_(&model), obs_(&obs), y_star_(std::move(y_star)), map_(map), op_(op) {
  require(y_star_.size() == obs.n_y(), "potential: data length does not match the observation operator");
  require(obs.B.cols() == model.n_dofs(), "potential: observation operator does not match the model");
  if (map_ != StateMap::model) {
    require(op_ != nullptr, "potential: map " + to_string(map_) + " needs a trained surrogate");
    require(op_->basis.bound(), "potential: surrogate basis is not bound to a mass matrix");
    require(op_->basis.dim() == model.n_dofs(), "potential: surrogate dimension does not match the model");
  }
}

Vector Potential::state(const Vector& m, EvalCounters& cost) const {
  using clock = std::chrono::steady_clock;
  auto seconds = [](clock::time_point a) { return std::chrono::duration<double>(clock::now() - a).count(); };
  const auto t0 = clock::now();
  if (map_ == StateMap::model) {
    // Count the iterations even when Newton fails.
    try {
      model::ForwardSolution sol = model_->solve_forward(m);
      cost.forward_solves += 1;
      cost.newton_iters += sol.newton_iters;
      cost.model_seconds += seconds(t0);
      return std::move(sol.u.values);
    } catch (const model::NewtonFailure& e) {
      cost.newton_iters += static_cast<long>(e.history.size());
      cost.model_seconds += seconds(t0);
      throw;
    }
  }
  Vector u = op_->predict(m);
  cost.surrogate_evals += 1;
  cost.surrogate_seconds += seconds(t0);
  if (map_ == StateMap::surrogate) return u;
  const auto t1 = clock::now();
  model::Correction c = model_->error_correct(u, m);
  cost.correction_solves += c.linear_solves;
  cost.correction_seconds += seconds(t1);
  return std::move(c.u.values);
}

PotentialValue Potential::operator()(const Vector& m) const {
  PotentialValue out;
  out.cost.potential_evals = 1;
  Vector u;
  try {
    u = state(m, out.cost);
  } catch (const Error& e) {
    out.cost.failures += 1;
    throw PotentialFailure(e.what(), out.cost);
  }
  out.phi = misfit_potential(*obs_, y_star_, u);
  return out;
}

PotentialFn Potential::function() const {
  return [self = *this](const Vector& m) { return self(m); };
}

} // namespace opcorrect::bayes
