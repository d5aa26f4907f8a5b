#pragma once

#include "opcorrect/bayes/pcn.hpp"

#include <string>

namespace opcorrect::bayes {

enum class Transform { identity, exp, exp_plus_1 };
Transform parse_transform(const std::string& text);
std::string to_string(Transform t);
Vector apply_transform(const Vector& m, Transform t);

/// Kept samples remaining in one chain after dropping floor(burn_in_frac * n_kept).
int post_burn_in_count(const ChainRecord& chain, double burn_in_frac);

/// Sample average of transform(m) over the post-burn-in samples of all chains.
Vector posterior_mean(const std::vector<ChainRecord>& chains, double burn_in_frac, Transform transform);

} // namespace opcorrect::bayes
