#include "opcorrect/surrogate/adam.hpp"

#include <cmath>

namespace opcorrect::surrogate {

void adam_step(Vector& params, const Vector& grads, AdamState& state, const AdamOptions& o,
               const std::vector<char>* mask) {
  require(grads.size() == params.size(), "adam_step: gradient length mismatch");
  require(grads.allFinite(), "adam_step: nonfinite gradient");
  require(!mask || static_cast<Eigen::Index>(mask->size()) == params.size(), "adam_step: mask length mismatch");
  if (state.m.size() != params.size()) {
    state.m = Vector::Zero(params.size());
    state.v = Vector::Zero(params.size());
    state.step = 0;
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(state.step));
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    if (mask && !(*mask)[static_cast<std::size_t>(i)]) continue;
    state.m[i] = o.beta1 * state.m[i] + (1.0 - o.beta1) * grads[i];
    state.v[i] = o.beta2 * state.v[i] + (1.0 - o.beta2) * grads[i] * grads[i];
    params[i] -= o.lr * (state.m[i] / c1) / (std::sqrt(state.v[i] / c2) + o.eps);
  }
}

} // namespace opcorrect::surrogate
