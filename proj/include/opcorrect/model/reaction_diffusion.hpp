#pragma once

#include "opcorrect/fem/cg.hpp"
#include "opcorrect/fem/field.hpp"
#include "opcorrect/fem/p1_space.hpp"

#include <vector>

namespace opcorrect::model {

struct NewtonOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int max_iter = 25;
  int max_backtracks = 10;
  double backtrack_factor = 0.5;
  double armijo = 1e-4;
};

struct ModelOptions {
  /// false gives the linear variant (cubic reaction dropped).
  bool reaction = true;
  double top_value = 1.0;
  double bottom_value = 0.0;
  NewtonOptions newton;
  fem::CgOptions cg;
};

struct ForwardSolution {
  fem::NodalField u;
  /// Linear systems solved, counting the linear-variant initial guess as the
  /// first iteration, so newton_iters == linear_solve_count.
  int newton_iters = 0;
  int linear_solve_count = 0;
  double final_residual_norm = 0.0;
  /// ||R(lift)||, the scale of the relative stopping test.
  double reference_residual_norm = 0.0;
  bool converged = false;
  /// ||R(u_k)|| after each iteration.
  std::vector<double> residual_history;
};

class NewtonFailure : public Error {
public:
  explicit NewtonFailure(std::vector<double> history);
  std::vector<double> history;
};

struct Correction {
  fem::NodalField u;
  int linear_solves = 0;
};

class ReactionDiffusion;

/// Derivative of the parameter-to-state map at a solved pair (u, m). Holds
/// the Dirichlet-eliminated Jacobian so repeated actions cost one CG solve each.
class Linearization {
public:
  /// dF(m) dm = -J^-1 dR/dm dm; zero on Dirichlet nodes.
  Vector tangent(const Vector& dm, long* linear_solves = nullptr) const;
  /// dF(m)^* w with respect to the mass inner products on both spaces.
  Vector adjoint(const Vector& w, long* linear_solves = nullptr) const;
  /// M_param dF^* dF v, i.e. C^T J^-1 M J^-1 C v; two linearized solves.
  Vector normal_action(const Vector& v, long* linear_solves = nullptr) const;

  /// Unprojected dR/dm dm with Dirichlet rows zeroed.
  Vector parameter_residual_derivative(const Vector& dm) const;
  /// (dR/dm)^T lambda.
  Vector parameter_residual_derivative_transpose(const Vector& lambda) const;

private:
  friend class ReactionDiffusion;
  Linearization(const ReactionDiffusion& model, Vector u, Vector m);

  const ReactionDiffusion* model_;
  Vector u_;
  Vector m_;
  std::vector<double> exp_m_qp_;  // exp(m_h) at degree-4 points, triangle-major
  fem::CsrMatrix jacobian_;       // Dirichlet-eliminated
};

/// -div(exp(m) grad u) + u^3 = 0 on the unit square, u = 1 on top, u = 0 on
/// bottom, zero flux on the sides. Residual, Jacobian, Newton forward solve,
/// residual-based error correction, and linearized actions. Stateless after
/// construction; safe to share across threads.
class ReactionDiffusion {
public:
  explicit ReactionDiffusion(const fem::Mesh& mesh, ModelOptions options = {});

  const fem::P1Space& space() const { return space_; }
  const fem::Mesh& mesh() const { return space_.mesh(); }
  const ModelOptions& options() const { return options_; }
  int n_dofs() const { return space_.n_dofs(); }
  const std::vector<int>& dirichlet_nodes() const { return dirichlet_nodes_; }
  const std::vector<double>& dirichlet_values() const { return dirichlet_values_; }
  const fem::CsrMatrix& mass() const { return mass_; }
  /// Unit-coefficient stiffness, used for H1 norms.
  const fem::CsrMatrix& stiffness() const { return stiffness_; }

  /// Dirichlet values at constrained nodes, zero elsewhere.
  Vector lift() const;
  /// Copy of u with Dirichlet entries overwritten by the prescribed values.
  Vector with_boundary_values(Vector u) const;

  /// <R(u, m), v> for all test functions in U0 (Dirichlet rows zeroed).
  Vector residual(const Vector& u, const Vector& m) const;
  Vector diffusion_residual(const Vector& u, const Vector& m) const;
  Vector reaction_residual(const Vector& u) const;
  /// Unconstrained Jacobian exp(m)-stiffness + 3 u^2 mass.
  fem::CsrMatrix jacobian(const Vector& u, const Vector& m) const;

  ForwardSolution solve_forward(const Vector& m) const;
  ForwardSolution solve_forward(const Vector& m, double tol, int max_newton) const;

  /// One linearized solve at u_tilde: J(u,m) u_C = -R(u,m) + J(u,m) u with u_C
  /// in V_u. Boundary entries of u_tilde are replaced by the Dirichlet values
  /// before linearizing.
  Correction error_correct(const Vector& u_tilde, const Vector& m) const;

  /// Checks ||R(u, m)|| <= 1e-6 first.
  Linearization linearize(const Vector& u, const Vector& m) const;
  Vector tangent_action(const Vector& u, const Vector& m, const Vector& dm,
                        long* linear_solves = nullptr) const;
  Vector adjoint_action(const Vector& u, const Vector& m, const Vector& w,
                        long* linear_solves = nullptr) const;

  /// Solves the linear system with Dirichlet rows eliminated for the given values.
  Vector solve_constrained(fem::CsrMatrix A, Vector rhs, const std::vector<double>& values) const;

private:
  friend class Linearization;
  void check_inputs(const Vector& u, const Vector& m) const;
  void zero_dirichlet_rows(Vector& r) const;
  Vector exp_stiffness_apply(const Vector& cell_integrals, const Vector& u) const;
  Vector linear_guess(const Vector& m) const;

  fem::P1Space space_;
  ModelOptions options_;
  fem::CsrMatrix mass_;
  fem::CsrMatrix stiffness_;
  std::vector<int> dirichlet_nodes_;
  std::vector<double> dirichlet_values_;
  std::vector<double> zeros_;
  std::vector<char> is_dirichlet_;
};

} // namespace opcorrect::model
