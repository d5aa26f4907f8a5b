#include "opcorrect/surrogate/derivative_basis.hpp"

#include "opcorrect/common/parallel.hpp"
#include "opcorrect/fem/cg.hpp"

#include <Eigen/Eigenvalues>

#include <atomic>
#include <cmath>
#include <optional>

namespace opcorrect::surrogate {

namespace {

Matrix apply(const fem::CsrMatrix& B, const Matrix& V) {
  Matrix out(V.rows(), V.cols());
  for (Eigen::Index j = 0; j < V.cols(); ++j) out.col(j) = B * Vector(V.col(j));
  return out;
}

// Q <- Q U S^-1/2 from the eigendecomposition of Q^T B Q, dropping directions
// below the relative threshold. Returns the number of columns kept.
int b_orthonormalize(Matrix& Q, const fem::CsrMatrix& B) {
  Matrix G = Q.transpose() * apply(B, Q);
  G = 0.5 * (G + G.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(G);
  const Vector& s = eig.eigenvalues();
  const double smax = s.maxCoeff();
  std::vector<int> keep;
  for (int k = static_cast<int>(s.size()) - 1; k >= 0; --k)
    if (smax > 0.0 && s[k] > 1e-12 * smax) keep.push_back(k);
  Matrix T(Q.cols(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    T.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(keep[c]) / std::sqrt(s[keep[c]]);
  Q = (Q * T).eval();
  return static_cast<int>(keep.size());
}

} // namespace

EigenResult randomized_generalized_eigensolver(const std::function<Matrix(const Matrix&)>& apply_A,
                                               const fem::CsrMatrix& B, int rank, int oversample,
                                               RngStream& rng, int power_iterations) {
  const int d = B.n_rows();
  require(rank >= 1 && oversample >= 0, "eigensolver: rank must be positive, oversample nonnegative");
  require(power_iterations >= 0, "eigensolver: power iterations must be nonnegative");
  const int l = rank + oversample;
  require(l <= d, "eigensolver: rank + oversample exceeds the dimension");

  Matrix omega(d, l);
  for (int j = 0; j < l; ++j)
    for (int i = 0; i < d; ++i) omega(i, j) = rng.normal();

  // First pass: range of B^-1 A.
  fem::CgOptions mass_cg;
  auto range = [&](const Matrix& X) {
    const Matrix AX = apply_A(X);
    Matrix Y(d, AX.cols());
    for (Eigen::Index j = 0; j < AX.cols(); ++j) Y.col(j) = fem::cg_solve(B, AX.col(j), mass_cg).x;
    return Y;
  };
  Matrix Q = range(omega);
  for (int q = 0; q < power_iterations; ++q) {
    b_orthonormalize(Q, B);
    Q = range(Q);
  }
  b_orthonormalize(Q, B);
  const int achieved = b_orthonormalize(Q, B);
  if (achieved < rank)
    throw Error("eigensolver breakdown: achieved rank " + std::to_string(achieved) + " < requested " +
                std::to_string(rank));

  // Second pass: Rayleigh-Ritz on span(Q).
  Matrix T = Q.transpose() * apply_A(Q);
  T = 0.5 * (T + T.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(T);
  EigenResult res;
  res.achieved_rank = achieved;
  res.vectors.resize(d, rank);
  res.eigenvalues.resize(rank);
  for (int k = 0; k < rank; ++k) {
    const int src = achieved - 1 - k;
    res.eigenvalues[k] = std::max(0.0, eig.eigenvalues()[src]);
    res.vectors.col(k) = Q * eig.eigenvectors().col(src);
  }
  return res;
}

DerivativeBasis compute_derivative_basis(const model::ReactionDiffusion& model,
                                         const std::vector<Vector>& m_samples,
                                         const std::vector<Vector>& states, int r_in, int oversample,
                                         RngStream& rng, int jobs, int power_iterations) {
  const std::size_t n = m_samples.size();
  require(n >= 1, "compute_derivative_basis: no samples");
  require(states.empty() || states.size() == n, "compute_derivative_basis: states/samples count mismatch");

  DerivativeBasis out;
  std::vector<std::optional<model::Linearization>> lins(n);
  std::vector<long> forward(n, 0);
  parallel_for(n, jobs, [&](std::size_t j, std::size_t) {
    Vector u;
    if (states.empty()) {
      const auto sol = model.solve_forward(m_samples[j]);
      forward[j] = sol.linear_solve_count;
      u = sol.u.values;
    } else {
      u = states[j];
    }
    lins[j].emplace(model.linearize(u, m_samples[j]));
  });
  for (long f : forward) out.forward_solves += f;

  std::atomic<long> solves{0};
  auto apply_A = [&](const Matrix& X) {
    std::vector<Matrix> partial(n, Matrix::Zero(X.rows(), X.cols()));
    parallel_for(n, jobs, [&](std::size_t j, std::size_t) {
      long local = 0;
      for (Eigen::Index c = 0; c < X.cols(); ++c)
        partial[j].col(c) = lins[j]->normal_action(X.col(c), &local);
      solves += local;
    });
    Matrix sum = Matrix::Zero(X.rows(), X.cols());
    for (const auto& p : partial) sum += p;
    return Matrix(sum / static_cast<double>(n));
  };

  EigenResult eig = randomized_generalized_eigensolver(apply_A, model.mass(), r_in, oversample, rng,
                                                     power_iterations);
  out.basis = std::move(eig.vectors);
  out.eigenvalues = std::move(eig.eigenvalues);
  out.linear_solves = solves.load();
  return out;
}

} // namespace opcorrect::surrogate
