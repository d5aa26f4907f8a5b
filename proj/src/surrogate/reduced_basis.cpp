#include "opcorrect/surrogate/reduced_basis.hpp"

#include <cmath>

namespace opcorrect::surrogate {

namespace {

Matrix apply(const fem::CsrMatrix& M, const Matrix& V) {
  Matrix out(V.rows(), V.cols());
  for (Eigen::Index j = 0; j < V.cols(); ++j) out.col(j) = M * Vector(V.col(j));
  return out;
}

} // namespace

void ReducedBasis::validate() const {
  const Eigen::Index d = input_basis.rows();
  require(d > 0 && input_basis.cols() > 0 && output_basis.cols() > 0, "ReducedBasis: empty basis");
  require(output_basis.rows() == d, "ReducedBasis: input and output bases live on different meshes");
  require(input_mean.size() == d && output_mean.size() == d, "ReducedBasis: mean length mismatch");
  require(input_scales.size() == input_basis.cols(), "ReducedBasis: scales length mismatch");
  require((input_scales.array() > 0.0).all(), "ReducedBasis: scales must be positive");
}

void ReducedBasis::bind(const fem::CsrMatrix& M) {
  require(M.n_rows() == dim(), "ReducedBasis: mass matrix size differs from basis length");
  if (input_scales.size() == 0) input_scales = Vector::Ones(r_in());
  validate();
  input_projector = apply(M, input_basis);
  output_projector = apply(M, output_basis);
}

Vector ReducedBasis::encode_input(const Vector& m) const {
  require(bound(), "ReducedBasis: not bound to a mass matrix");
  require(m.size() == dim(), "encode_input: field length differs from basis length");
  return (input_projector.transpose() * (m - input_mean)).cwiseQuotient(input_scales);
}

Matrix ReducedBasis::encode_inputs(const std::vector<Vector>& ms) const {
  Matrix X(r_in(), static_cast<Eigen::Index>(ms.size()));
  for (std::size_t j = 0; j < ms.size(); ++j) X.col(static_cast<Eigen::Index>(j)) = encode_input(ms[j]);
  return X;
}

Vector ReducedBasis::encode_output(const Vector& u) const {
  require(bound(), "ReducedBasis: not bound to a mass matrix");
  require(u.size() == dim(), "encode_output: field length differs from basis length");
  return output_projector.transpose() * (u - output_mean);
}

Matrix ReducedBasis::encode_outputs(const std::vector<Vector>& us) const {
  Matrix Y(r_out(), static_cast<Eigen::Index>(us.size()));
  for (std::size_t j = 0; j < us.size(); ++j) Y.col(static_cast<Eigen::Index>(j)) = encode_output(us[j]);
  return Y;
}

Vector ReducedBasis::decode_output(const Vector& coords) const {
  require(coords.size() == r_out(), "decode_output: coordinate length mismatch");
  return output_mean + output_basis * coords;
}

Vector ReducedBasis::decode_input(const Vector& coords) const {
  require(coords.size() == r_in(), "decode_input: coordinate length mismatch");
  return input_mean + input_basis * coords.cwiseProduct(input_scales);
}

void ReducedBasis::fit_input_scales(const std::vector<Vector>& ms) {
  require(ms.size() >= 2, "fit_input_scales: need at least two samples");
  input_scales = Vector::Ones(r_in());
  const Matrix X = encode_inputs(ms);
  const Vector mean = X.rowwise().mean();
  const double n = static_cast<double>(ms.size());
  for (int k = 0; k < r_in(); ++k) {
    const double var = (X.row(k).array() - mean[k]).square().sum() / (n - 1.0);
    input_scales[k] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
}

} // namespace opcorrect::surrogate
