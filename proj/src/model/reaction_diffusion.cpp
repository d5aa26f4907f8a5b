#include "opcorrect/model/reaction_diffusion.hpp"

#include "opcorrect/fem/dirichlet.hpp"

#include <cmath>
#include <sstream>

namespace opcorrect::model {

namespace {

std::string history_message(const std::vector<double>& history) {
  std::ostringstream os;
  os << "Newton solve did not converge; residual history:";
  for (double r : history) os << ' ' << r;
  return os.str();
}

} // namespace

NewtonFailure::NewtonFailure(std::vector<double> h) : Error(history_message(h)), history(std::move(h)) {}

ReactionDiffusion::ReactionDiffusion(const fem::Mesh& mesh, ModelOptions options)
    : space_(mesh), options_(std::move(options)) {
  require(options_.newton.max_iter >= 1, "ReactionDiffusion: max_iter must be positive");
  mass_ = space_.mass();
  stiffness_ = space_.stiffness(Vector::Ones(space_.n_dofs()));
  is_dirichlet_.assign(static_cast<std::size_t>(space_.n_dofs()), 0);
  for (int node : mesh.boundary(fem::Side::bottom)) {
    dirichlet_nodes_.push_back(node);
    dirichlet_values_.push_back(options_.bottom_value);
  }
  for (int node : mesh.boundary(fem::Side::top)) {
    dirichlet_nodes_.push_back(node);
    dirichlet_values_.push_back(options_.top_value);
  }
  for (int node : dirichlet_nodes_) is_dirichlet_[static_cast<std::size_t>(node)] = 1;
  zeros_.assign(dirichlet_nodes_.size(), 0.0);
}

Vector ReactionDiffusion::lift() const { return with_boundary_values(Vector::Zero(n_dofs())); }

Vector ReactionDiffusion::with_boundary_values(Vector u) const {
  require(u.size() == n_dofs(), "state length differs from node count");
  for (std::size_t k = 0; k < dirichlet_nodes_.size(); ++k) u[dirichlet_nodes_[k]] = dirichlet_values_[k];
  return u;
}

void ReactionDiffusion::check_inputs(const Vector& u, const Vector& m) const {
  require(u.size() == n_dofs(), "state length differs from node count");
  require(m.size() == n_dofs(), "parameter length differs from node count");
  require(u.allFinite(), "state field must be finite");
  require(m.allFinite(), "parameter field must be finite");
}

void ReactionDiffusion::zero_dirichlet_rows(Vector& r) const {
  for (int node : dirichlet_nodes_) r[node] = 0.0;
}

Vector ReactionDiffusion::exp_stiffness_apply(const Vector& c, const Vector& u) const {
  Vector r = Vector::Zero(n_dofs());
  for (int t = 0; t < space_.n_triangles(); ++t) {
    const auto& tri = space_.triangle(t);
    const auto& g = space_.gradients(t);
    double gx = 0.0, gy = 0.0;
    for (int a = 0; a < 3; ++a) {
      gx += u[tri[a]] * g[a][0];
      gy += u[tri[a]] * g[a][1];
    }
    for (int a = 0; a < 3; ++a) r[tri[a]] += c[t] * (gx * g[a][0] + gy * g[a][1]);
  }
  return r;
}

Vector ReactionDiffusion::diffusion_residual(const Vector& u, const Vector& m) const {
  check_inputs(u, m);
  Vector r = exp_stiffness_apply(space_.exp_cell_integrals(m), u);
  zero_dirichlet_rows(r);
  return r;
}

Vector ReactionDiffusion::reaction_residual(const Vector& u) const {
  require(u.size() == n_dofs(), "state length differs from node count");
  Vector r = Vector::Zero(n_dofs());
  if (!options_.reaction) return r;
  const auto& rule = fem::degree4_rule();
  for (int t = 0; t < space_.n_triangles(); ++t) {
    const auto& tri = space_.triangle(t);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& bary = rule.points[q];
      const double uq = space_.interpolate(u, t, bary);
      const double w = space_.area(t) * rule.weights[q] * uq * uq * uq;
      for (int a = 0; a < 3; ++a) r[tri[a]] += w * bary[a];
    }
  }
  zero_dirichlet_rows(r);
  return r;
}

Vector ReactionDiffusion::residual(const Vector& u, const Vector& m) const {
  return diffusion_residual(u, m) + reaction_residual(u);
}

fem::CsrMatrix ReactionDiffusion::jacobian(const Vector& u, const Vector& m) const {
  check_inputs(u, m);
  fem::CsrMatrix J = space_.exp_stiffness(m);
  if (!options_.reaction) return J;
  const auto& rule = fem::degree4_rule();
  auto& v = J.values();
  for (int t = 0; t < space_.n_triangles(); ++t) {
    const auto& s = space_.scatter(t);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& bary = rule.points[q];
      const double uq = space_.interpolate(u, t, bary);
      const double w = 3.0 * space_.area(t) * rule.weights[q] * uq * uq;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) v[s[3 * a + b]] += w * bary[a] * bary[b];
    }
  }
  return J;
}

Vector ReactionDiffusion::solve_constrained(fem::CsrMatrix A, Vector rhs,
                                            const std::vector<double>& values) const {
  fem::apply_dirichlet_in_place(A, rhs, dirichlet_nodes_, values);
  Vector x0 = Vector::Zero(n_dofs());
  fem::impose_values(x0, dirichlet_nodes_, values);
  Vector x = fem::cg_solve(A, rhs, options_.cg, &x0).x;
  fem::impose_values(x, dirichlet_nodes_, values);
  return x;
}

Vector ReactionDiffusion::linear_guess(const Vector& m) const {
  return solve_constrained(space_.exp_stiffness(m), Vector::Zero(n_dofs()), dirichlet_values_);
}

ForwardSolution ReactionDiffusion::solve_forward(const Vector& m) const {
  return solve_forward(m, options_.newton.rel_tol, options_.newton.max_iter);
}

ForwardSolution ReactionDiffusion::solve_forward(const Vector& m, double tol, int max_newton) const {
  require(m.size() == n_dofs(), "parameter length differs from node count");
  require(m.allFinite(), "parameter field must be finite");
  require(max_newton >= 1, "solve_forward: max_newton must be positive");
  const NewtonOptions& opt = options_.newton;

  ForwardSolution sol;
  sol.reference_residual_norm = residual(lift(), m).norm();
  const double target = std::max(tol * sol.reference_residual_norm, opt.abs_tol);

  // The linear-variant solution is the initial guess and the first iteration.
  Vector u = linear_guess(m);
  sol.newton_iters = 1;
  sol.linear_solve_count = 1;
  Vector r = residual(u, m);
  double rn = r.norm();
  sol.residual_history.push_back(rn);

  while (!(rn <= target)) {
    if (!std::isfinite(rn) || sol.newton_iters >= max_newton) throw NewtonFailure(sol.residual_history);
    const Vector du = solve_constrained(jacobian(u, m), -r, zeros_);
    ++sol.newton_iters;
    ++sol.linear_solve_count;

    double step = 1.0;
    Vector best_u = u + du;
    Vector best_r = residual(best_u, m);
    double best_rn = best_r.norm();
    for (int k = 0; k < opt.max_backtracks && !(best_rn <= (1.0 - opt.armijo * step) * rn); ++k) {
      step *= opt.backtrack_factor;
      Vector trial = u + step * du;
      Vector trial_r = residual(trial, m);
      const double trial_rn = trial_r.norm();
      if (trial_rn < best_rn || !std::isfinite(best_rn)) {
        best_u = std::move(trial);
        best_r = std::move(trial_r);
        best_rn = trial_rn;
      }
    }
    u = std::move(best_u);
    r = std::move(best_r);
    rn = best_rn;
    sol.residual_history.push_back(rn);
  }

  sol.converged = true;
  sol.final_residual_norm = rn;
  sol.u = {std::move(u), fem::FieldRole::state};
  return sol;
}

Correction ReactionDiffusion::error_correct(const Vector& u_tilde, const Vector& m) const {
  const Vector u = with_boundary_values(u_tilde);
  check_inputs(u, m);
  fem::CsrMatrix J = jacobian(u, m);
  Vector rhs = J * u - residual(u, m);
  Correction c;
  c.u = {solve_constrained(std::move(J), std::move(rhs), dirichlet_values_), fem::FieldRole::state};
  c.linear_solves = 1;
  return c;
}

Linearization ReactionDiffusion::linearize(const Vector& u, const Vector& m) const {
  check_inputs(u, m);
  const double rn = residual(u, m).norm();
  if (!(rn <= 1e-6))
    throw InvalidArgument("linearize: state does not solve the model (residual " + std::to_string(rn) + ")");
  return Linearization(*this, u, m);
}

Vector ReactionDiffusion::tangent_action(const Vector& u, const Vector& m, const Vector& dm,
                                         long* linear_solves) const {
  return linearize(u, m).tangent(dm, linear_solves);
}

Vector ReactionDiffusion::adjoint_action(const Vector& u, const Vector& m, const Vector& w,
                                         long* linear_solves) const {
  return linearize(u, m).adjoint(w, linear_solves);
}

Linearization::Linearization(const ReactionDiffusion& model, Vector u, Vector m)
    : model_(&model), u_(std::move(u)), m_(std::move(m)) {
  const auto& space = model.space();
  const auto& rule = fem::degree4_rule();
  exp_m_qp_.reserve(static_cast<std::size_t>(space.n_triangles()) * rule.weights.size());
  for (int t = 0; t < space.n_triangles(); ++t)
    for (const auto& bary : rule.points) exp_m_qp_.push_back(std::exp(space.interpolate(m_, t, bary)));
  jacobian_ = model.jacobian(u_, m_);
  Vector dummy = Vector::Zero(model.n_dofs());
  fem::apply_dirichlet_in_place(jacobian_, dummy, model.dirichlet_nodes_, model.zeros_);
}

Vector Linearization::parameter_residual_derivative(const Vector& dm) const {
  require(dm.size() == model_->n_dofs(), "parameter direction length differs from node count");
  const auto& space = model_->space();
  const auto& rule = fem::degree4_rule();
  const std::size_t nq = rule.weights.size();
  Vector f = Vector::Zero(model_->n_dofs());
  for (int t = 0; t < space.n_triangles(); ++t) {
    const auto& tri = space.triangle(t);
    const auto& g = space.gradients(t);
    double s = 0.0;
    for (std::size_t q = 0; q < nq; ++q)
      s += rule.weights[q] * exp_m_qp_[t * nq + q] * space.interpolate(dm, t, rule.points[q]);
    s *= space.area(t);
    double gx = 0.0, gy = 0.0;
    for (int a = 0; a < 3; ++a) {
      gx += u_[tri[a]] * g[a][0];
      gy += u_[tri[a]] * g[a][1];
    }
    for (int a = 0; a < 3; ++a) f[tri[a]] += s * (gx * g[a][0] + gy * g[a][1]);
  }
  model_->zero_dirichlet_rows(f);
  return f;
}

Vector Linearization::parameter_residual_derivative_transpose(const Vector& lambda) const {
  require(lambda.size() == model_->n_dofs(), "adjoint length differs from node count");
  const auto& space = model_->space();
  const auto& rule = fem::degree4_rule();
  const std::size_t nq = rule.weights.size();
  Vector g_out = Vector::Zero(model_->n_dofs());
  Vector lam = lambda;
  model_->zero_dirichlet_rows(lam);
  for (int t = 0; t < space.n_triangles(); ++t) {
    const auto& tri = space.triangle(t);
    const auto& g = space.gradients(t);
    double ux = 0.0, uy = 0.0, lx = 0.0, ly = 0.0;
    for (int a = 0; a < 3; ++a) {
      ux += u_[tri[a]] * g[a][0];
      uy += u_[tri[a]] * g[a][1];
      lx += lam[tri[a]] * g[a][0];
      ly += lam[tri[a]] * g[a][1];
    }
    const double dot = space.area(t) * (ux * lx + uy * ly);
    for (std::size_t q = 0; q < nq; ++q) {
      const double w = dot * rule.weights[q] * exp_m_qp_[t * nq + q];
      for (int a = 0; a < 3; ++a) g_out[tri[a]] += w * rule.points[q][a];
    }
  }
  return g_out;
}

Vector Linearization::tangent(const Vector& dm, long* linear_solves) const {
  const Vector f = parameter_residual_derivative(dm);
  if (linear_solves) ++*linear_solves;
  return -fem::cg_solve(jacobian_, f, model_->options().cg).x;
}

Vector Linearization::adjoint(const Vector& w, long* linear_solves) const {
  require(w.size() == model_->n_dofs(), "state direction length differs from node count");
  Vector y = model_->mass() * w;
  model_->zero_dirichlet_rows(y);
  const Vector lambda = fem::cg_solve(jacobian_, y, model_->options().cg).x;
  if (linear_solves) ++*linear_solves;
  const Vector g = parameter_residual_derivative_transpose(lambda);
  return -fem::cg_solve(model_->mass(), g).x;
}

Vector Linearization::normal_action(const Vector& v, long* linear_solves) const {
  const Vector du = tangent(v, linear_solves);
  Vector y = model_->mass() * du;
  model_->zero_dirichlet_rows(y);
  const Vector lambda = fem::cg_solve(jacobian_, y, model_->options().cg).x;
  if (linear_solves) ++*linear_solves;
  // du = -J^-1 C v, so C^T J^-1 M du carries a minus sign.
  return -parameter_residual_derivative_transpose(lambda);
}

} // namespace opcorrect::model
