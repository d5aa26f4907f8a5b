#include "opcorrect/surrogate/accuracy.hpp"

#include "opcorrect/fem/field.hpp"

namespace opcorrect::surrogate {

NormKind parse_norm(const std::string& text) {
  if (text == "l2" || text == "L2") return NormKind::l2;
  if (text == "h1" || text == "H1") return NormKind::h1;
  throw InvalidArgument("unknown norm '" + text + "' (expected l2 or h1)");
}

std::string to_string(NormKind norm) { return norm == NormKind::l2 ? "l2" : "h1"; }

AccuracyResult relative_accuracy(const std::vector<Vector>& truths, const std::vector<Vector>& approximations,
                                 const fem::CsrMatrix& M, const fem::CsrMatrix& K, NormKind norm) {
  require(!truths.empty(), "accuracy: empty test set");
  require(truths.size() == approximations.size(), "accuracy: truth/approximation count mismatch");
  AccuracyResult res;
  double total = 0.0;
  for (std::size_t j = 0; j < truths.size(); ++j) {
    const auto nt = fem::field_norms(truths[j], M, K);
    const auto ne = fem::field_norms(truths[j] - approximations[j], M, K);
    const double denom = norm == NormKind::l2 ? nt.l2 : nt.h1;
    const double num = norm == NormKind::l2 ? ne.l2 : ne.h1;
    require(denom > 0.0, "accuracy: reference state has zero norm");
    res.relative_errors.push_back(num / denom);
    total += num / denom;
  }
  res.accuracy = 100.0 * (1.0 - total / static_cast<double>(truths.size()));
  return res;
}

AccuracyResult generalization_accuracy(const std::vector<Vector>& test_ms, const std::vector<Vector>& truths,
                                       const std::function<Vector(const Vector&)>& state_map,
                                       const fem::CsrMatrix& M, const fem::CsrMatrix& K, NormKind norm) {
  require(!test_ms.empty(), "accuracy: empty test set");
  require(test_ms.size() == truths.size(), "accuracy: parameter/state count mismatch");
  std::vector<Vector> approx;
  approx.reserve(test_ms.size());
  for (const auto& m : test_ms) approx.push_back(state_map(m));
  return relative_accuracy(truths, approx, M, K, norm);
}

} // namespace opcorrect::surrogate
