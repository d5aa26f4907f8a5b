#include "opcorrect/fem/mesh.hpp"

#include "opcorrect/common/types.hpp"

#include <string>

namespace opcorrect::fem {

Mesh build_unit_square_mesh(int nx, int ny) {
  require(nx >= 2 && ny >= 2,
          "build_unit_square_mesh: nx and ny must be >= 2, got " + std::to_string(nx) + "x" +
              std::to_string(ny));
  Mesh mesh;
  mesh.nx = nx;
  mesh.ny = ny;
  mesh.nodes.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.nodes.push_back({static_cast<double>(i) / nx, static_cast<double>(j) / ny});

  mesh.triangles.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = mesh.node_index(i, j);
      const int b = mesh.node_index(i + 1, j);
      const int c = mesh.node_index(i + 1, j + 1);
      const int d = mesh.node_index(i, j + 1);
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }
  }

  auto& bottom = mesh.boundary_nodes[static_cast<int>(Side::bottom)];
  auto& top = mesh.boundary_nodes[static_cast<int>(Side::top)];
  auto& left = mesh.boundary_nodes[static_cast<int>(Side::left)];
  auto& right = mesh.boundary_nodes[static_cast<int>(Side::right)];
  for (int i = 0; i <= nx; ++i) {
    bottom.push_back(mesh.node_index(i, 0));
    top.push_back(mesh.node_index(i, ny));
  }
  for (int j = 1; j < ny; ++j) {
    left.push_back(mesh.node_index(0, j));
    right.push_back(mesh.node_index(nx, j));
  }

  for (int i = 0; i < nx; ++i) {
    mesh.boundary_edges.push_back({mesh.node_index(i, 0), mesh.node_index(i + 1, 0), Side::bottom});
    mesh.boundary_edges.push_back({mesh.node_index(i, ny), mesh.node_index(i + 1, ny), Side::top});
  }
  for (int j = 0; j < ny; ++j) {
    mesh.boundary_edges.push_back({mesh.node_index(0, j), mesh.node_index(0, j + 1), Side::left});
    mesh.boundary_edges.push_back({mesh.node_index(nx, j), mesh.node_index(nx, j + 1), Side::right});
  }
  return mesh;
}

double signed_area(const Mesh& mesh, int triangle) {
  const auto& t = mesh.triangles[static_cast<std::size_t>(triangle)];
  const Point& p0 = mesh.nodes[static_cast<std::size_t>(t[0])];
  const Point& p1 = mesh.nodes[static_cast<std::size_t>(t[1])];
  const Point& p2 = mesh.nodes[static_cast<std::size_t>(t[2])];
  return 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
}

} // namespace opcorrect::fem
