#include "opcorrect/fem/dirichlet.hpp"

#include <string>
#include <vector>

namespace opcorrect::fem {

void apply_dirichlet_in_place(CsrMatrix& A, Vector& rhs, std::span<const int> nodes,
                              std::span<const double> values) {
  require(A.n_rows() == A.n_cols(), "apply_dirichlet: matrix must be square");
  require(rhs.size() == A.n_rows(), "apply_dirichlet: rhs length mismatch");
  require(nodes.size() == values.size(), "apply_dirichlet: nodes/values length mismatch");

  const int n = A.n_rows();
  std::vector<char> constrained(static_cast<std::size_t>(n), 0);
  Vector g = Vector::Zero(n);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const int node = nodes[k];
    require(node >= 0 && node < n, "apply_dirichlet: node " + std::to_string(node) + " out of range");
    require(!constrained[node], "apply_dirichlet: duplicate node index " + std::to_string(node));
    constrained[node] = 1;
    g[node] = values[k];
  }

  const auto& off = A.row_offsets();
  const auto& col = A.col_indices();
  auto& val = A.values();
  for (int i = 0; i < n; ++i) {
    if (constrained[i]) {
      for (int k = off[i]; k < off[i + 1]; ++k) val[k] = (col[k] == i) ? 1.0 : 0.0;
      rhs[i] = g[i];
      continue;
    }
    for (int k = off[i]; k < off[i + 1]; ++k) {
      if (constrained[col[k]]) {
        rhs[i] -= val[k] * g[col[k]];
        val[k] = 0.0;
      }
    }
  }
  for (int i = 0; i < n; ++i)
    if (constrained[i] && A.find(i, i) < 0)
      throw InvalidArgument("apply_dirichlet: constrained row lacks a stored diagonal");
}

void impose_values(Vector& x, std::span<const int> nodes, std::span<const double> values) {
  require(nodes.size() == values.size(), "impose_values: nodes/values length mismatch");
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    require(nodes[k] >= 0 && nodes[k] < x.size(), "impose_values: node out of range");
    x[nodes[k]] = values[k];
  }
}

ConstrainedSystem apply_dirichlet(CsrMatrix A, Vector rhs, std::span<const int> nodes,
                                  std::span<const double> values) {
  apply_dirichlet_in_place(A, rhs, nodes, values);
  return {std::move(A), std::move(rhs)};
}

} // namespace opcorrect::fem
