#pragma once

#include "opcorrect/fem/sparse.hpp"

#include <functional>
#include <string>
#include <vector>

namespace opcorrect::surrogate {

enum class NormKind { l2, h1 };

NormKind parse_norm(const std::string& text);
std::string to_string(NormKind norm);

struct AccuracyResult {
  /// 100 (1 - mean relative error).
  double accuracy = 0.0;
  std::vector<double> relative_errors;
};

AccuracyResult relative_accuracy(const std::vector<Vector>& truths, const std::vector<Vector>& approximations,
                                 const fem::CsrMatrix& M, const fem::CsrMatrix& K, NormKind norm);

/// Evaluates `state_map` at each test parameter and compares with the supplied
/// reference states.
AccuracyResult generalization_accuracy(const std::vector<Vector>& test_ms, const std::vector<Vector>& truths,
                                       const std::function<Vector(const Vector&)>& state_map,
                                       const fem::CsrMatrix& M, const fem::CsrMatrix& K, NormKind norm);

} // namespace opcorrect::surrogate
