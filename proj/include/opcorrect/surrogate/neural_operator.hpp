#pragma once

#include "opcorrect/surrogate/reduced_basis.hpp"
#include "opcorrect/surrogate/resnet.hpp"

#include <filesystem>
#include <iosfwd>

namespace opcorrect::surrogate {

/// Reduced-basis network m -> decode(net(encode(m))) on an nx x ny mesh.
struct NeuralOperator {
  int nx = 0;
  int ny = 0;
  ReducedBasis basis;
  ResNet net;

  /// Rejects fields whose length differs from the basis.
  Vector predict(const Vector& m) const;
};

// DIPNET v1: "DIPNET v1 <r_in> <r_out> <n_layers> <layer_rank>\n", then
//   FEFIELD output mean, FEFIELD prior mean,
//   input basis (d x r_in, column-major), input scales (r_in),
//   output basis (d x r_out), input eigenvalues (r_in), output eigenvalues (r_out),
//   network weights in ResNet flat order,
// all little-endian float64.
void write_dipnet(std::ostream& os, const NeuralOperator& op);
void write_dipnet(const std::filesystem::path& path, const NeuralOperator& op);
/// The returned basis is unbound; call basis.bind(M) before predicting.
NeuralOperator read_dipnet(std::istream& is);
NeuralOperator read_dipnet(const std::filesystem::path& path);

} // namespace opcorrect::surrogate
