#include "opcorrect/bayes/posterior.hpp"

#include <cmath>

namespace opcorrect::bayes {

Transform parse_transform(const std::string& text) {
  if (text == "identity") return Transform::identity;
  if (text == "exp") return Transform::exp;
  if (text == "exp_plus_1") return Transform::exp_plus_1;
  throw InvalidArgument("unknown transform '" + text + "' (expected identity, exp or exp_plus_1)");
}

std::string to_string(Transform t) {
  switch (t) {
  case Transform::identity: return "identity";
  case Transform::exp: return "exp";
  case Transform::exp_plus_1: return "exp_plus_1";
  }
  return "?";
}

Vector apply_transform(const Vector& m, Transform t) {
  switch (t) {
  case Transform::identity: return m;
  case Transform::exp: return m.array().exp().matrix();
  case Transform::exp_plus_1: return (m.array().exp() + 1.0).matrix();
  }
  return m;
}

int post_burn_in_count(const ChainRecord& chain, double burn_in_frac) {
  require(burn_in_frac >= 0.0 && burn_in_frac < 1.0, "burn_in_frac must lie in [0, 1)");
  const int n = static_cast<int>(chain.samples.size());
  return n - static_cast<int>(std::floor(burn_in_frac * n));
}

Vector posterior_mean(const std::vector<ChainRecord>& chains, double burn_in_frac, Transform transform) {
  Vector sum;
  long count = 0;
  for (const auto& c : chains) {
    const int keep = post_burn_in_count(c, burn_in_frac);
    const int n = static_cast<int>(c.samples.size());
    for (int i = n - keep; i < n; ++i) {
      const Vector v = apply_transform(c.samples[static_cast<std::size_t>(i)], transform);
      if (count == 0) sum = Vector::Zero(v.size());
      require(v.size() == sum.size(), "posterior_mean: chains hold fields of different sizes");
      sum += v;
      ++count;
    }
  }
  if (count == 0) throw InvalidArgument("posterior_mean: no samples remain after burn-in");
  return sum / static_cast<double>(count);
}

} // namespace opcorrect::bayes
