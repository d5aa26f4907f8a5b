#include "opcorrect/bayes/observation.hpp"

#include <cmath>
#include <iostream>
#include <optional>
#include <string>

namespace opcorrect::bayes {

Vector ObservationSetup::observe(const Vector& u) const {
  require(u.size() == B.cols(), "observe: state length " + std::to_string(u.size()) + " does not match " +
                                    std::to_string(B.cols()));
  return B * u;
}

std::vector<fem::Point> observation_grid(int grid) {
  require(grid >= 1, "observation grid must be at least 1x1");
  std::vector<fem::Point> pts;
  pts.reserve(static_cast<std::size_t>(grid * grid));
  for (int j = 0; j < grid; ++j)
    for (int i = 0; i < grid; ++i) pts.push_back({(i + 0.5) / grid, (j + 0.5) / grid});
  return pts;
}

namespace {

// Empty optional names the first empty disc through `empty`.
std::optional<Matrix> averaging_matrix(const fem::Mesh& mesh, const Vector& lumped,
                                       const std::vector<fem::Point>& pts, double radius, int& empty) {
  Matrix B = Matrix::Zero(static_cast<Eigen::Index>(pts.size()), mesh.n_nodes());
  const double r2 = radius * radius;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    double total = 0.0;
    for (int n = 0; n < mesh.n_nodes(); ++n) {
      const double dx = mesh.nodes[n].x - pts[k].x, dy = mesh.nodes[n].y - pts[k].y;
      if (dx * dx + dy * dy <= r2) {
        B(static_cast<Eigen::Index>(k), n) = lumped[n];
        total += lumped[n];
      }
    }
    if (total <= 0.0) {
      empty = static_cast<int>(k);
      return std::nullopt;
    }
    B.row(static_cast<Eigen::Index>(k)) /= total;
  }
  return B;
}

void check_inputs(const fem::Mesh& mesh, const Vector& lumped, double radius) {
  require(lumped.size() == mesh.n_nodes(), "observation: lumped mass length does not match the mesh");
  require(std::isfinite(radius) && radius > 0.0, "observation radius must be positive");
  require((lumped.array() > 0.0).all(), "observation: lumped mass must be positive");
}

} // namespace

ObservationSetup build_observation(const fem::Mesh& mesh, const Vector& lumped_mass, int grid, double radius) {
  check_inputs(mesh, lumped_mass, radius);
  ObservationSetup obs;
  obs.points = observation_grid(grid);
  obs.radius = obs.requested_radius = radius;
  int empty = -1;
  auto B = averaging_matrix(mesh, lumped_mass, obs.points, radius, empty);
  if (!B) {
    const auto& p = obs.points[static_cast<std::size_t>(empty)];
    throw InvalidArgument("observation disc of radius " + std::to_string(radius) + " around (" +
                          std::to_string(p.x) + ", " + std::to_string(p.y) + ") contains no mesh node");
  }
  obs.B = std::move(*B);
  return obs;
}

ObservationSetup build_observation_adjusting(const fem::Mesh& mesh, const Vector& lumped_mass, int grid,
                                             double radius) {
  check_inputs(mesh, lumped_mass, radius);
  ObservationSetup obs;
  obs.points = observation_grid(grid);
  obs.requested_radius = radius;
  for (int attempt = 0; attempt < 60; ++attempt) {
    int empty = -1;
    if (auto B = averaging_matrix(mesh, lumped_mass, obs.points, radius, empty)) {
      obs.radius = radius;
      obs.B = std::move(*B);
      return obs;
    }
    std::clog << "warning: observation radius " << radius << " leaves a disc empty, growing to " << 1.5 * radius
              << '\n';
    radius *= 1.5;
  }
  throw Error("observation: no radius covers every observation point");
}

} // namespace opcorrect::bayes
