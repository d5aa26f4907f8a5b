#pragma once

#include "opcorrect/fem/sparse.hpp"

#include <functional>

namespace opcorrect::fem {

enum class Preconditioner { none, jacobi };

struct CgOptions {
  double rel_tol = 1e-12;
  /// Nonpositive means 10 * n.
  int max_iter = 0;
  Preconditioner precond = Preconditioner::jacobi;
  /// Called with each iterate, starting with the initial guess.
  std::function<void(const Vector&)> on_iterate;
};

struct CgResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;
};

class CgFailure : public Error {
public:
  CgFailure(int iterations, double last_residual);
  int iterations;
  double last_residual;
};

/// Preconditioned conjugate gradients for a symmetric positive definite A.
/// Converged when ||b - Ax|| <= rel_tol * ||b||. Throws CgFailure otherwise.
CgResult cg_solve(const CsrMatrix& A, const Vector& b, const CgOptions& options = {},
                  const Vector* x0 = nullptr);

} // namespace opcorrect::fem
