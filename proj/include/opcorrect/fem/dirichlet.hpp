#pragma once

#include "opcorrect/fem/sparse.hpp"

#include <span>

namespace opcorrect::fem {

/// Symmetric elimination of strongly imposed values. Constrained rows and
/// columns are zeroed, the diagonal set to one, and the right-hand side lifted
/// so that the constrained system stays symmetric and returns exactly the
/// prescribed values at constrained nodes. Duplicate node indices are rejected.
void apply_dirichlet_in_place(CsrMatrix& A, Vector& rhs, std::span<const int> nodes,
                              std::span<const double> values);

struct ConstrainedSystem {
  CsrMatrix matrix;
  Vector rhs;
};

/// Overwrites x at the constrained nodes. A CG solve of the eliminated system
/// started from such a guess keeps those entries exact.
void impose_values(Vector& x, std::span<const int> nodes, std::span<const double> values);

ConstrainedSystem apply_dirichlet(CsrMatrix A, Vector rhs, std::span<const int> nodes,
                                  std::span<const double> values);

} // namespace opcorrect::fem
