#include "opcorrect/fem/cg.hpp"

#include <cmath>
#include <string>

namespace opcorrect::fem {

CgFailure::CgFailure(int iters, double last)
    : Error("CG did not converge in " + std::to_string(iters) +
            " iterations (relative residual " + std::to_string(last) + ")"),
      iterations(iters),
      last_residual(last) {}

CgResult cg_solve(const CsrMatrix& A, const Vector& b, const CgOptions& options, const Vector* x0) {
  const int n = A.n_rows();
  require(A.n_cols() == n && b.size() == n, "cg_solve: dimension mismatch");
  require(options.rel_tol > 0.0, "cg_solve: tolerance must be positive");
  const int max_iter = options.max_iter > 0 ? options.max_iter : 10 * std::max(n, 1);

  CgResult result;
  result.x = x0 ? *x0 : Vector::Zero(n);
  if (options.on_iterate) options.on_iterate(result.x);

  const double b_norm = b.norm();
  if (b_norm == 0.0) {
    result.x.setZero();
    return result;
  }

  Vector inv_diag;
  if (options.precond == Preconditioner::jacobi) {
    inv_diag = A.diagonal();
    for (int i = 0; i < n; ++i) {
      require(inv_diag[i] > 0.0, "cg_solve: Jacobi preconditioner needs a positive diagonal");
      inv_diag[i] = 1.0 / inv_diag[i];
    }
  }

  Vector r = b;
  Vector Ap(n);
  if (x0) {
    A.multiply(result.x, Ap);
    r -= Ap;
  }
  double r_norm = r.norm();
  if (r_norm <= options.rel_tol * b_norm) {
    result.relative_residual = r_norm / b_norm;
    return result;
  }
  Vector z = inv_diag.size() ? Vector(inv_diag.cwiseProduct(r)) : r;
  Vector p = z;
  double rz = r.dot(z);

  for (int it = 1; it <= max_iter; ++it) {
    A.multiply(p, Ap);
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0)) throw CgFailure(it, r_norm / b_norm);
    const double alpha = rz / pAp;
    result.x.noalias() += alpha * p;
    r.noalias() -= alpha * Ap;
    if (options.on_iterate) options.on_iterate(result.x);
    r_norm = r.norm();
    if (r_norm <= options.rel_tol * b_norm) {
      result.iterations = it;
      result.relative_residual = r_norm / b_norm;
      return result;
    }
    if (inv_diag.size())
      z = inv_diag.cwiseProduct(r);
    else
      z = r;
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw CgFailure(max_iter, r_norm / b_norm);
}

} // namespace opcorrect::fem
