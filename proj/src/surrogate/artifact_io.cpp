#include "opcorrect/surrogate/neural_operator.hpp"

#include "opcorrect/common/binary_io.hpp"
#include "opcorrect/fem/field.hpp"

#include <fstream>
#include <sstream>

namespace opcorrect::surrogate {

Vector NeuralOperator::predict(const Vector& m) const {
  require(m.size() == basis.dim(), "predict: field length " + std::to_string(m.size()) +
                                       " differs from the surrogate's " + std::to_string(basis.dim()));
  return basis.decode_output(net.forward(basis.encode_input(m)));
}

void write_dipnet(std::ostream& os, const NeuralOperator& op) {
  const ReducedBasis& b = op.basis;
  b.validate();
  require(op.net.r_in() == b.r_in() && op.net.r_out() == b.r_out(), "write_dipnet: network and basis disagree");
  os << "DIPNET v1 " << b.r_in() << ' ' << b.r_out() << ' ' << op.net.n_layers() << ' '
     << op.net.layer_rank() << '\n';
  fem::write_fefield(os, op.nx, op.ny, {b.output_mean, fem::FieldRole::state});
  fem::write_fefield(os, op.nx, op.ny, {b.input_mean, fem::FieldRole::parameter});
  io::write_matrix(os, b.input_basis);
  io::write_vector(os, b.input_scales);
  io::write_matrix(os, b.output_basis);
  io::write_vector(os, b.input_eigenvalues);
  io::write_vector(os, b.output_eigenvalues);
  io::write_vector(os, op.net.flatten());
  if (!os) throw Error("write_dipnet: stream error");
}

void write_dipnet(const std::filesystem::path& path, const NeuralOperator& op) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_dipnet(out, op);
}

NeuralOperator read_dipnet(std::istream& is) {
  std::istringstream header(io::read_header_line(is));
  std::string magic, version;
  int r_in = 0, r_out = 0, n_layers = 0, rank = 0;
  header >> magic >> version >> r_in >> r_out >> n_layers >> rank;
  if (!header || magic != "DIPNET" || version != "v1") throw Error("not a DIPNET v1 artifact");
  if (r_in < 1 || r_out < 1 || n_layers < 0 || rank < 1) throw Error("DIPNET: bad dimensions in header");

  NeuralOperator op;
  const fem::FieldRecord out_mean = fem::read_fefield(is);
  const fem::FieldRecord in_mean = fem::read_fefield(is);
  if (out_mean.nx != in_mean.nx || out_mean.ny != in_mean.ny) throw Error("DIPNET: mesh mismatch between fields");
  op.nx = out_mean.nx;
  op.ny = out_mean.ny;
  const Eigen::Index d = out_mean.field.values.size();
  ReducedBasis& b = op.basis;
  b.output_mean = out_mean.field.values;
  b.input_mean = in_mean.field.values;
  b.input_basis = io::read_matrix(is, d, r_in);
  b.input_scales = io::read_vector(is, r_in);
  b.output_basis = io::read_matrix(is, d, r_out);
  b.input_eigenvalues = io::read_vector(is, r_in);
  b.output_eigenvalues = io::read_vector(is, r_out);
  b.validate();

  op.net = ResNet(r_in, r_out, rank);
  RngStream unused(0);
  for (int k = 0; k < n_layers; ++k) op.net.append_layer(unused);
  op.net.unflatten(io::read_vector(is, op.net.n_params()));
  if (!op.net.all_finite()) throw Error("DIPNET: nonfinite weights");
  return op;
}

NeuralOperator read_dipnet(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_dipnet(in);
}

} // namespace opcorrect::surrogate
