#pragma once

#include <array>
#include <vector>

namespace opcorrect::fem {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class Side { bottom = 0, right = 1, top = 2, left = 3 };

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  Side side = Side::bottom;
};

/// Structured triangulation of the unit square. Node (i, j) sits at
/// (i/nx, j/ny) with index j*(nx+1)+i, so rows run bottom to top. Each cell is
/// split along its (i,j)-(i+1,j+1) diagonal into two counterclockwise triangles.
///
/// Boundary node lists are disjoint: the four corners belong to the bottom and
/// top lists, and left/right hold only the interior nodes of their edges.
struct Mesh {
  int nx = 0;
  int ny = 0;
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::array<std::vector<int>, 4> boundary_nodes;
  std::vector<BoundaryEdge> boundary_edges;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int node_index(int i, int j) const { return j * (nx + 1) + i; }
  const std::vector<int>& boundary(Side s) const { return boundary_nodes[static_cast<int>(s)]; }
};

Mesh build_unit_square_mesh(int nx, int ny);

double signed_area(const Mesh& mesh, int triangle);

} // namespace opcorrect::fem
