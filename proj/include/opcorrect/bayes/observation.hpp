#pragma once

#include "opcorrect/fem/mesh.hpp"
#include "opcorrect/common/types.hpp"

#include <vector>

namespace opcorrect::bayes {

/// Local-average observation operator y = B u with additive noise N(0, sigma^2 I).
struct ObservationSetup {
  std::vector<fem::Point> points;
  double radius = 0.0;
  /// Radius asked for; differs from `radius` when the adjusting builder grew it.
  double requested_radius = 0.0;
  Matrix B;  // n_y x d_u, rows nonnegative and summing to one
  double sigma = 0.0;

  int n_y() const { return static_cast<int>(B.rows()); }
  Vector observe(const Vector& u) const;
};

/// Observation points ((i+0.5)/grid, (j+0.5)/grid), j-major.
std::vector<fem::Point> observation_grid(int grid);

/// Row k of B holds the lumped-mass weights of the nodes within `radius` of
/// point k, normalized to sum one. Throws if any disc contains no node.
ObservationSetup build_observation(const fem::Mesh& mesh, const Vector& lumped_mass, int grid, double radius);

/// As build_observation, but multiplies the radius by 1.5 until every disc is
/// nonempty. Each growth is reported on std::clog.
ObservationSetup build_observation_adjusting(const fem::Mesh& mesh, const Vector& lumped_mass, int grid,
                                             double radius);

} // namespace opcorrect::bayes
