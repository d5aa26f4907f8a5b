#pragma once

#include "opcorrect/fem/mesh.hpp"
#include "opcorrect/fem/sparse.hpp"

#include <array>
#include <vector>

namespace opcorrect::fem {

/// Triangle quadrature in barycentric coordinates; weights sum to one and are
/// multiplied by the triangle area at use sites.
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;
};

/// 6-point symmetric rule, exact for polynomials of degree 4.
const QuadratureRule& degree4_rule();
/// Edge-midpoint rule, exact for degree 2.
const QuadratureRule& midpoint_rule();

using Gradients = std::array<std::array<double, 2>, 3>;

/// Piecewise-linear Lagrange space on a Mesh with cached element geometry and
/// element-to-CSR scatter maps. Immutable after construction.
class P1Space {
public:
  explicit P1Space(Mesh mesh);

  const Mesh& mesh() const { return mesh_; }
  int n_dofs() const { return mesh_.n_nodes(); }
  int n_triangles() const { return mesh_.n_triangles(); }

  double area(int t) const { return area_[static_cast<std::size_t>(t)]; }
  const Gradients& gradients(int t) const { return grad_[static_cast<std::size_t>(t)]; }
  const std::array<int, 3>& triangle(int t) const {
    return mesh_.triangles[static_cast<std::size_t>(t)];
  }
  /// CSR value positions of local entry (a, b) stored at index 3*a+b.
  const std::array<int, 9>& scatter(int t) const { return scatter_[static_cast<std::size_t>(t)]; }

  /// Matrix with the P1 sparsity pattern and all values zero.
  CsrMatrix zero_matrix() const;

  CsrMatrix mass() const;
  Vector lumped_mass() const;
  /// Stiffness with a nodal coefficient interpolated linearly (linear in kappa).
  /// Rejects nonpositive or nonfinite entries.
  CsrMatrix stiffness(const Vector& kappa) const;
  /// Stiffness weighted by exp(m_h) evaluated at the degree-4 quadrature points.
  CsrMatrix exp_stiffness(const Vector& m) const;
  /// Per-triangle integral of exp(m_h).
  Vector exp_cell_integrals(const Vector& m) const;
  /// Consistent mass of all boundary edges (Robin term).
  CsrMatrix boundary_mass() const;

  /// Value of the interpolant of f at point q of `rule` in triangle t.
  double interpolate(const Vector& f, int t, const std::array<double, 3>& bary) const {
    const auto& tri = triangle(t);
    return bary[0] * f[tri[0]] + bary[1] * f[tri[1]] + bary[2] * f[tri[2]];
  }

private:
  Mesh mesh_;
  std::vector<double> area_;
  std::vector<Gradients> grad_;
  std::vector<std::array<int, 9>> scatter_;
  std::vector<int> row_offsets_;
  std::vector<int> col_indices_;
};

// Free-function forms used at module boundaries.
CsrMatrix assemble_mass(const Mesh& mesh);
CsrMatrix assemble_weighted_stiffness(const Mesh& mesh, const Vector& kappa);

} // namespace opcorrect::fem
