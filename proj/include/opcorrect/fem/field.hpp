#pragma once

#include "opcorrect/fem/mesh.hpp"
#include "opcorrect/fem/sparse.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace opcorrect::fem {

enum class FieldRole { state, parameter };

std::string to_string(FieldRole role);
FieldRole parse_field_role(const std::string& text);

/// Nodal coefficient vector of a P1 field (state u or parameter m).
struct NodalField {
  Vector values;
  FieldRole role = FieldRole::parameter;

  NodalField() = default;
  NodalField(Vector v, FieldRole r) : values(std::move(v)), role(r) {}

  Eigen::Index size() const { return values.size(); }
  /// Throws unless the length matches the mesh and all entries are finite.
  void validate(const Mesh& mesh) const;
};

/// Interpolates f(x, y) at the mesh nodes.
template <class F>
Vector interpolate(const Mesh& mesh, F&& f) {
  Vector v(mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i) v[i] = f(mesh.nodes[i].x, mesh.nodes[i].y);
  return v;
}

struct FieldNorms {
  double l2 = 0.0;
  double h1 = 0.0;
};

/// l2 = sqrt(f'Mf), h1 = sqrt(f'Mf + f'Kf) with K the unit-coefficient stiffness.
FieldNorms field_norms(const Vector& f, const CsrMatrix& M, const CsrMatrix& K);

// FEFIELD v1: "FEFIELD v1 <nx> <ny> <n_nodes> <role>\n" + n_nodes little-endian float64.
struct FieldRecord {
  int nx = 0;
  int ny = 0;
  NodalField field;
};

void write_fefield(std::ostream& os, int nx, int ny, const NodalField& field);
void write_fefield(const std::filesystem::path& path, int nx, int ny, const NodalField& field);
FieldRecord read_fefield(std::istream& is);
FieldRecord read_fefield(const std::filesystem::path& path);

} // namespace opcorrect::fem
