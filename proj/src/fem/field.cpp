#include "opcorrect/fem/field.hpp"

#include "opcorrect/common/binary_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace opcorrect::fem {

std::string to_string(FieldRole role) { return role == FieldRole::state ? "state" : "parameter"; }

FieldRole parse_field_role(const std::string& text) {
  if (text == "state") return FieldRole::state;
  if (text == "parameter") return FieldRole::parameter;
  throw InvalidArgument("unknown field role '" + text + "'");
}

void NodalField::validate(const Mesh& mesh) const {
  require(values.size() == mesh.n_nodes(), "NodalField: length " + std::to_string(values.size()) +
                                               " differs from node count " +
                                               std::to_string(mesh.n_nodes()));
  require(values.allFinite(), "NodalField: nonfinite entry");
}

FieldNorms field_norms(const Vector& f, const CsrMatrix& M, const CsrMatrix& K) {
  const double l2sq = std::max(0.0, M.quadratic_form(f));
  const double h1sq = std::max(0.0, l2sq + K.quadratic_form(f));
  return {std::sqrt(l2sq), std::sqrt(h1sq)};
}

void write_fefield(std::ostream& os, int nx, int ny, const NodalField& field) {
  os << "FEFIELD v1 " << nx << ' ' << ny << ' ' << field.values.size() << ' '
     << to_string(field.role) << '\n';
  io::write_vector(os, field.values);
}

void write_fefield(const std::filesystem::path& path, int nx, int ny, const NodalField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_fefield(out, nx, ny, field);
}

FieldRecord read_fefield(std::istream& is) {
  std::istringstream header(io::read_header_line(is));
  std::string magic, version, role;
  FieldRecord rec;
  long n = 0;
  header >> magic >> version >> rec.nx >> rec.ny >> n >> role;
  if (!header || magic != "FEFIELD" || version != "v1")
    throw Error("not a FEFIELD v1 record");
  if (n != static_cast<long>(rec.nx + 1) * (rec.ny + 1))
    throw Error("FEFIELD: node count inconsistent with nx, ny");
  rec.field.role = parse_field_role(role);
  rec.field.values = io::read_vector(is, n);
  return rec;
}

FieldRecord read_fefield(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_fefield(in);
}

} // namespace opcorrect::fem
