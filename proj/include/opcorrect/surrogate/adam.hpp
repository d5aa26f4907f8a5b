#pragma once

#include "opcorrect/common/types.hpp"

#include <vector>

namespace opcorrect::surrogate {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  Vector m;
  Vector v;
  long step = 0;
};

/// One bias-corrected Adam update. When `mask` is given only entries with a
/// nonzero mask value (and their moments) change. Rejects nonfinite gradients.
void adam_step(Vector& params, const Vector& grads, AdamState& state, const AdamOptions& options = {},
               const std::vector<char>* mask = nullptr);

} // namespace opcorrect::surrogate
