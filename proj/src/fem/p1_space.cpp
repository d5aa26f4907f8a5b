#include "opcorrect/fem/p1_space.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace opcorrect::fem {

const QuadratureRule& degree4_rule() {
  static const QuadratureRule rule = [] {
    QuadratureRule r;
    r.degree = 4;
    const double a1 = 0.445948490915965, b1 = 1.0 - 2.0 * a1, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, b2 = 1.0 - 2.0 * a2, w2 = 0.109951743655322;
    r.points = {{a1, a1, b1}, {a1, b1, a1}, {b1, a1, a1}, {a2, a2, b2}, {a2, b2, a2}, {b2, a2, a2}};
    r.weights = {w1, w1, w1, w2, w2, w2};
    return r;
  }();
  return rule;
}

const QuadratureRule& midpoint_rule() {
  static const QuadratureRule rule = [] {
    QuadratureRule r;
    r.degree = 2;
    r.points = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
    r.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    return r;
  }();
  return rule;
}

P1Space::P1Space(Mesh mesh) : mesh_(std::move(mesh)) {
  const int nt = mesh_.n_triangles();
  const int nn = mesh_.n_nodes();
  area_.resize(static_cast<std::size_t>(nt));
  grad_.resize(static_cast<std::size_t>(nt));

  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh_.triangles[static_cast<std::size_t>(t)];
    const Point& p0 = mesh_.nodes[static_cast<std::size_t>(tri[0])];
    const Point& p1 = mesh_.nodes[static_cast<std::size_t>(tri[1])];
    const Point& p2 = mesh_.nodes[static_cast<std::size_t>(tri[2])];
    const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    require(det > 0.0, "P1Space: triangle with nonpositive area");
    area_[t] = 0.5 * det;
    // grad phi_a = (y_b - y_c, x_c - x_b) / det for (a, b, c) cyclic.
    auto& g = grad_[t];
    g[0] = {(p1.y - p2.y) / det, (p2.x - p1.x) / det};
    g[1] = {(p2.y - p0.y) / det, (p0.x - p2.x) / det};
    g[2] = {(p0.y - p1.y) / det, (p1.x - p0.x) / det};
  }

  std::vector<std::set<int>> adjacency(static_cast<std::size_t>(nn));
  for (const auto& tri : mesh_.triangles)
    for (int a : tri)
      for (int b : tri) adjacency[static_cast<std::size_t>(a)].insert(b);
  row_offsets_.assign(static_cast<std::size_t>(nn) + 1, 0);
  for (int i = 0; i < nn; ++i)
    row_offsets_[i + 1] = row_offsets_[i] + static_cast<int>(adjacency[i].size());
  col_indices_.reserve(static_cast<std::size_t>(row_offsets_.back()));
  for (const auto& row : adjacency) col_indices_.insert(col_indices_.end(), row.begin(), row.end());

  scatter_.resize(static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh_.triangles[static_cast<std::size_t>(t)];
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const auto begin = col_indices_.begin() + row_offsets_[tri[a]];
        const auto end = col_indices_.begin() + row_offsets_[tri[a] + 1];
        scatter_[t][3 * a + b] = static_cast<int>(std::lower_bound(begin, end, tri[b]) - col_indices_.begin());
      }
    }
  }
}

CsrMatrix P1Space::zero_matrix() const {
  return CsrMatrix(n_dofs(), n_dofs(), row_offsets_, col_indices_,
                   std::vector<double>(col_indices_.size(), 0.0));
}

CsrMatrix P1Space::mass() const {
  CsrMatrix M = zero_matrix();
  auto& v = M.values();
  for (int t = 0; t < n_triangles(); ++t) {
    const double c = area(t) / 12.0;
    const auto& s = scatter(t);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) v[s[3 * a + b]] += (a == b ? 2.0 : 1.0) * c;
  }
  return M;
}

Vector P1Space::lumped_mass() const { return mass().row_sums(); }

namespace {

void add_stiffness(CsrMatrix& K, const P1Space& space, int t, double weight) {
  const auto& g = space.gradients(t);
  const auto& s = space.scatter(t);
  auto& v = K.values();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      v[s[3 * a + b]] += weight * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
}

} // namespace

CsrMatrix P1Space::stiffness(const Vector& kappa) const {
  require(kappa.size() == n_dofs(), "stiffness: coefficient length differs from node count");
  for (Eigen::Index i = 0; i < kappa.size(); ++i)
    require(std::isfinite(kappa[i]) && kappa[i] > 0.0,
            "stiffness: coefficient must be finite and strictly positive");
  CsrMatrix K = zero_matrix();
  for (int t = 0; t < n_triangles(); ++t) {
    const auto& tri = triangle(t);
    const double mean = (kappa[tri[0]] + kappa[tri[1]] + kappa[tri[2]]) / 3.0;
    add_stiffness(K, *this, t, area(t) * mean);
  }
  return K;
}

Vector P1Space::exp_cell_integrals(const Vector& m) const {
  require(m.size() == n_dofs(), "exp_cell_integrals: parameter length differs from node count");
  const auto& rule = degree4_rule();
  Vector c(n_triangles());
  for (int t = 0; t < n_triangles(); ++t) {
    double s = 0.0;
    for (std::size_t q = 0; q < rule.weights.size(); ++q)
      s += rule.weights[q] * std::exp(interpolate(m, t, rule.points[q]));
    c[t] = area(t) * s;
  }
  return c;
}

CsrMatrix P1Space::exp_stiffness(const Vector& m) const {
  require(m.allFinite(), "exp_stiffness: parameter field must be finite");
  const Vector c = exp_cell_integrals(m);
  CsrMatrix K = zero_matrix();
  for (int t = 0; t < n_triangles(); ++t) add_stiffness(K, *this, t, c[t]);
  return K;
}

CsrMatrix P1Space::boundary_mass() const {
  CsrMatrix B = zero_matrix();
  for (const auto& e : mesh_.boundary_edges) {
    const Point& pa = mesh_.nodes[static_cast<std::size_t>(e.a)];
    const Point& pb = mesh_.nodes[static_cast<std::size_t>(e.b)];
    const double len = std::hypot(pb.x - pa.x, pb.y - pa.y);
    B.values()[B.find(e.a, e.a)] += len / 3.0;
    B.values()[B.find(e.b, e.b)] += len / 3.0;
    B.values()[B.find(e.a, e.b)] += len / 6.0;
    B.values()[B.find(e.b, e.a)] += len / 6.0;
  }
  return B;
}

CsrMatrix assemble_mass(const Mesh& mesh) { return P1Space(mesh).mass(); }

CsrMatrix assemble_weighted_stiffness(const Mesh& mesh, const Vector& kappa) {
  return P1Space(mesh).stiffness(kappa);
}

} // namespace opcorrect::fem
