#include "opcorrect/surrogate/pod.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace opcorrect::surrogate {

namespace {

Matrix apply(const fem::CsrMatrix& M, const Matrix& V) {
  Matrix out(V.rows(), V.cols());
  for (Eigen::Index j = 0; j < V.cols(); ++j) out.col(j) = M * Vector(V.col(j));
  return out;
}

} // namespace

void mass_orthonormalize(Matrix& V, const fem::CsrMatrix& M) {
  const Eigen::Index d = V.rows();
  Eigen::Index next_unit = 0;
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    for (int attempt = 0; attempt <= d; ++attempt) {
      const double before = std::sqrt(std::max(0.0, M.quadratic_form(V.col(j))));
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index k = 0; k < j; ++k) {
          const Vector Mk = M * Vector(V.col(k));
          V.col(j) -= Mk.dot(V.col(j)) * V.col(k);
        }
      }
      const double after = std::sqrt(std::max(0.0, M.quadratic_form(V.col(j))));
      if (after > 1e-10 * std::max(before, 1e-300) && after > 0.0) {
        V.col(j) /= after;
        break;
      }
      V.col(j).setZero();
      V(next_unit++ % d, j) = 1.0;
    }
  }
}

PodResult compute_pod(const std::vector<Vector>& snapshots, const fem::CsrMatrix& M, int r_out) {
  const int n = static_cast<int>(snapshots.size());
  require(r_out >= 1, "compute_pod: r_out must be positive");
  require(r_out <= n, "compute_pod: r_out exceeds the number of snapshots");
  const Eigen::Index d = snapshots.front().size();
  require(M.n_rows() == d, "compute_pod: mass matrix size differs from snapshot length");

  PodResult res;
  Matrix D(d, n);
  res.mean = Vector::Zero(d);
  for (int j = 0; j < n; ++j) {
    require(snapshots[j].size() == d, "compute_pod: snapshot lengths differ");
    res.mean += snapshots[j];
  }
  res.mean /= n;
  for (int j = 0; j < n; ++j) D.col(j) = snapshots[j] - res.mean;

  Matrix G = D.transpose() * apply(M, D) / n;
  G = 0.5 * (G + G.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(G);
  // Energies at roundoff level relative to the snapshots themselves are zero.
  double scale = 0.0;
  for (const auto& s : snapshots) scale += M.quadratic_form(s) / n;
  const double floor = 1e-14 * scale;
  res.all_eigenvalues = eig.eigenvalues().reverse().unaryExpr([floor](double v) { return v > floor ? v : 0.0; });
  const double lam_max = res.all_eigenvalues[0];

  res.basis = Matrix::Zero(d, r_out);
  res.eigenvalues = res.all_eigenvalues.head(r_out);
  for (int k = 0; k < r_out; ++k) {
    const double lam = res.all_eigenvalues[k];
    if (lam > 1e-13 * lam_max && lam > 0.0)
      res.basis.col(k) = D * eig.eigenvectors().col(n - 1 - k) / std::sqrt(n * lam);
  }
  mass_orthonormalize(res.basis, M);
  res.tail_energy = res.all_eigenvalues.tail(n - r_out).sum();
  return res;
}

} // namespace opcorrect::surrogate
