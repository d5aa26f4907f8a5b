#pragma once

#include "opcorrect/fem/sparse.hpp"

#include <vector>

namespace opcorrect::surrogate {

/// Input (derivative-informed) and output (POD) bases on a shared P1 mesh.
/// Both spaces use the same mass matrix, which `bind` turns into cached
/// projectors M V for encoding.
struct ReducedBasis {
  Matrix input_basis;   // d_m x r_in
  Vector input_scales;  // r_in
  Vector input_mean;    // m_pr
  Matrix output_basis;  // d_u x r_out
  Vector output_mean;
  Vector input_eigenvalues;
  Vector output_eigenvalues;

  int r_in() const { return static_cast<int>(input_basis.cols()); }
  int r_out() const { return static_cast<int>(output_basis.cols()); }
  int dim() const { return static_cast<int>(input_basis.rows()); }

  void bind(const fem::CsrMatrix& M);
  bool bound() const { return input_projector.size() > 0; }

  /// diag(scales)^-1 V_in^T M (m - m_pr).
  Vector encode_input(const Vector& m) const;
  Matrix encode_inputs(const std::vector<Vector>& ms) const;
  /// V_out^T M (u - mean).
  Vector encode_output(const Vector& u) const;
  Matrix encode_outputs(const std::vector<Vector>& us) const;
  /// mean + V_out c.
  Vector decode_output(const Vector& coords) const;
  /// m_pr + V_in diag(scales) c, the M-orthogonal projection for c = encode(m).
  Vector decode_input(const Vector& coords) const;

  /// Sets input_scales to the per-coordinate sample standard deviation of the
  /// unscaled input coordinates (zero deviations become 1).
  void fit_input_scales(const std::vector<Vector>& ms);

  void validate() const;

  Matrix input_projector;   // M V_in
  Matrix output_projector;  // M V_out
};

} // namespace opcorrect::surrogate
