#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opcorrect/model/reaction_diffusion.hpp"
#include "opcorrect/prior/bilaplacian.hpp"
#include "oracles.hpp"

#include <cmath>
#include <iostream>

using namespace opcorrect;
using namespace opcorrect::model;
using namespace opcorrect::test_oracles;

namespace {

struct Setup {
  fem::Mesh mesh;
  ReactionDiffusion model;
  prior::BiLaplacianPrior prior;

  explicit Setup(int n, ModelOptions opts = {})
      : mesh(fem::build_unit_square_mesh(n, n)),
        model(mesh, opts),
        prior(mesh, 0.08, 2.0, Vector::Zero(mesh.n_nodes())) {}

  Vector draw(RngStream& rng) const { return prior.sample(rng).values; }
  double h1(const Vector& v) const {
    return fem::field_norms(v, model.mass(), model.stiffness()).h1;
  }
  double l2(const Vector& v) const {
    return fem::field_norms(v, model.mass(), model.stiffness()).l2;
  }
};


Vector random_interior_direction(const Setup& s, RngStream& rng) {
  Vector w = s.prior.colored_noise(rng.normal_vector(s.prior.dim()));
  for (int d : s.model.dirichlet_nodes()) w[d] = 0.0;
  return w / s.h1(w);
}

} // namespace

TEST_CASE("residual of the y field matches a dense quadrature oracle") {
  Setup s(8);
  const Vector m = Vector::Zero(s.mesh.n_nodes());
  const Vector y = fem::interpolate(s.mesh, [](double, double yy) { return yy; });
  const Vector r = s.model.residual(y, m);

  static const Radon rule;
  Vector oracle = Vector::Zero(s.mesh.n_nodes());
  for (const auto& t : s.mesh.triangles) {
    const double area = tri_area(s.mesh, t);
    for (std::size_t q = 0; q < rule.w.size(); ++q) {
      const auto& l = rule.pts[q];
      double yq = 0.0;
      for (int a = 0; a < 3; ++a) yq += l[a] * s.mesh.nodes[t[a]].y;
      for (int a = 0; a < 3; ++a) oracle[t[a]] += area * rule.w[q] * yq * yq * yq * l[a];
    }
  }
  for (int d : s.model.dirichlet_nodes()) oracle[d] = 0.0;
  CHECK((r - oracle).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(s.model.diffusion_residual(y, m).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("reaction term is cubic in the state") {
  Setup s(6);
  RngStream rng(4);
  const Vector u = rng.normal_vector(s.mesh.n_nodes());
  const Vector r1 = s.model.reaction_residual(u);
  const Vector r2 = s.model.reaction_residual(2.0 * u);
  CHECK((r2 - 8.0 * r1).norm() <= 1e-13 * r2.norm());
}

TEST_CASE("residual rejects nonfinite input") {
  Setup s(4);
  Vector u = Vector::Zero(s.mesh.n_nodes());
  const Vector m = u;
  u[3] = std::nan("");
  CHECK_THROWS_AS(s.model.residual(u, m), InvalidArgument);
  CHECK_THROWS_AS(s.model.jacobian(u, m), InvalidArgument);
}

TEST_CASE("jacobian: structure and finite differences") {
  Setup s(8);
  RngStream rng(8);
  const Vector m = s.draw(rng);
  const Vector zero = Vector::Zero(s.mesh.n_nodes());
  const fem::CsrMatrix J0 = s.model.jacobian(zero, m);
  CHECK((J0.to_dense() - s.model.space().exp_stiffness(m).to_dense()).norm() == 0.0);

  const Vector u = s.model.lift() + 0.3 * rng.normal_vector(s.mesh.n_nodes());
  const fem::CsrMatrix J = s.model.jacobian(u, m);
  CHECK(J.is_symmetric(1e-13));

  Vector w = rng.normal_vector(s.mesh.n_nodes());
  Vector Jw = J * w;
  for (int d : s.model.dirichlet_nodes()) Jw[d] = 0.0;
  const Vector r0 = s.model.residual(u, m);
  std::vector<double> eps, one_sided, central;
  for (double e : {1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6}) {
    eps.push_back(e);
    one_sided.push_back(((s.model.residual(u + e * w, m) - r0) / e - Jw).norm());
    central.push_back(((s.model.residual(u + e * w, m) - s.model.residual(u - e * w, m)) / (2 * e) - Jw).norm());
  }
  const double s1 = slope(eps, one_sided);
  INFO("one-sided slope " << s1);
  CHECK(s1 == doctest::Approx(1.0).epsilon(0.1));
  std::vector<double> ce(eps.begin(), eps.begin() + 3), cv(central.begin(), central.begin() + 3);
  CHECK(slope(ce, cv) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("linear variant with unit coefficient solves to the y field in one step") {
  ModelOptions opts;
  opts.reaction = false;
  Setup s(10, opts);
  const ForwardSolution sol = s.model.solve_forward(Vector::Zero(s.mesh.n_nodes()));
  const Vector y = fem::interpolate(s.mesh, [](double, double yy) { return yy; });
  CHECK((sol.u.values - y).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(sol.newton_iters == 1);
  CHECK(sol.linear_solve_count == 1);
  CHECK(sol.converged);
}

TEST_CASE("forward solve: boundary values, residual, counters") {
  Setup s(16);
  RngStream rng(10);
  for (int k = 0; k < 5; ++k) {
    const Vector m = s.draw(rng);
    const ForwardSolution sol = s.model.solve_forward(m);
    CHECK(sol.converged);
    CHECK(sol.linear_solve_count == sol.newton_iters);
    CHECK(sol.final_residual_norm <= 1e-10 * sol.reference_residual_norm + 1e-12);
    CHECK(s.model.residual(sol.u.values, m).norm() <= 1e-9);
    for (int n : s.mesh.boundary(fem::Side::top)) CHECK(sol.u.values[n] == 1.0);
    for (int n : s.mesh.boundary(fem::Side::bottom)) CHECK(sol.u.values[n] == 0.0);
  }
}

TEST_CASE("forward solve reports non-convergence with the history") {
  Setup s(8);
  RngStream rng(12);
  const Vector m = s.draw(rng);
  try {
    s.model.solve_forward(m, 1e-30, 2);
    FAIL("expected NewtonFailure");
  } catch (const NewtonFailure& e) {
    CHECK(e.history.size() == 2);
  }
  CHECK_THROWS_AS(s.model.solve_forward(m, 1e-10, 0), InvalidArgument);
}

TEST_CASE("forward solve agrees with a damped Picard oracle") {
  Setup s(32);
  RngStream rng(13);
  for (int k = 0; k < 2; ++k) {
    const Vector m = s.draw(rng);
    const Vector u = s.model.solve_forward(m).u.values;
    const Vector oracle = picard_oracle(s.model, m);
    const double err = s.l2(u - oracle);
    INFO("L2 difference " << err);
    CHECK(err < 1e-8);
  }
}

TEST_CASE("mean Newton iterations over prior draws") {
  Setup s(32);
  RngStream rng(14);
  double total = 0.0;
  for (int k = 0; k < 100; ++k) total += s.model.solve_forward(s.draw(rng)).newton_iters;
  const double mean = total / 100.0;
  std::cout << "mean Newton iterations at 32x32: " << mean << '\n';
  CHECK(mean >= 2.0);
  CHECK(mean <= 6.0);
}

TEST_CASE("Newton converges quadratically") {
  Setup s(16);
  RngStream rng(15);
  double worst = 0.0;
  int pairs = 0;
  for (int k = 0; k < 20; ++k) {
    const auto hist = s.model.solve_forward(s.draw(rng)).residual_history;
    for (std::size_t i = 0; i + 1 < hist.size(); ++i) {
      if (hist[i] > 1e-3 || hist[i + 1] < 1e-12) continue;
      worst = std::max(worst, hist[i + 1] / (hist[i] * hist[i]));
      ++pairs;
    }
  }
  std::cout << "max r_{k+1}/r_k^2 over " << pairs << " pairs: " << worst << '\n';
  CHECK(pairs > 0);
  CHECK(worst < 1e3);
}

TEST_CASE("error correction: fixed point, linear exactness, boundary invariance") {
  Setup s(16);
  RngStream rng(16);
  const Vector m = s.draw(rng);
  const Vector u = s.model.solve_forward(m, 1e-14, 25).u.values;
  const Correction c = s.model.error_correct(u, m);
  CHECK(c.linear_solves == 1);
  CHECK((c.u.values - u).cwiseAbs().maxCoeff() < 1e-10);

  Vector perturbed = u + 0.05 * random_interior_direction(s, rng);
  const Vector base = s.model.error_correct(perturbed, m).u.values;
  for (int d : s.model.dirichlet_nodes()) perturbed[d] += rng.normal();
  const Vector moved = s.model.error_correct(perturbed, m).u.values;
  CHECK((moved - base).cwiseAbs().maxCoeff() < 1e-12);
  for (std::size_t k = 0; k < s.model.dirichlet_nodes().size(); ++k)
    CHECK(moved[s.model.dirichlet_nodes()[k]] == s.model.dirichlet_values()[k]);

  ModelOptions lin;
  lin.reaction = false;
  Setup sl(12, lin);
  const Vector ml = sl.draw(rng);
  const Vector exact = sl.model.solve_forward(ml).u.values;
  const Vector corrected = sl.model.error_correct(rng.normal_vector(sl.mesh.n_nodes()), ml).u.values;
  CHECK((corrected - exact).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("error correction reduces the error quadratically") {
  Setup s(16);
  RngStream rng(17);
  const Vector m = s.draw(rng);
  const Vector u = s.model.solve_forward(m).u.values;
  const Vector w = random_interior_direction(s, rng);
  std::vector<double> eps, err;
  for (double e : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
    eps.push_back(e);
    err.push_back(s.h1(s.model.error_correct(u + e * w, m).u.values - u));
  }
  const double p = slope(eps, err);
  std::cout << "correction slope " << p << '\n';
  CHECK(p == doctest::Approx(2.0).epsilon(0.15));

  const Vector once = s.model.error_correct(u + 1e-2 * w, m).u.values;
  const Vector twice = s.model.error_correct(once, m).u.values;
  CHECK(s.h1(twice - u) < 1e-7);
}

TEST_CASE("tangent action") {
  Setup s(12);
  RngStream rng(18);
  const Vector m = s.draw(rng);
  const Vector u = s.model.solve_forward(m).u.values;
  const Linearization lin = s.model.linearize(u, m);
  const Vector zero = Vector::Zero(s.mesh.n_nodes());
  CHECK(lin.tangent(zero).norm() == 0.0);

  const Vector dm = s.prior.colored_noise(rng.normal_vector(s.prior.dim()));
  long solves = 0;
  const Vector du = lin.tangent(dm, &solves);
  CHECK(solves == 1);
  for (int d : s.model.dirichlet_nodes()) CHECK(du[d] == 0.0);
  const double eps = 1e-5;
  const Vector fd = (s.model.solve_forward(m + eps * dm).u.values - u) / eps;
  CHECK(s.l2(fd - du) / s.l2(du) <= 1e-3);
  CHECK((lin.tangent(2.5 * dm) - 2.5 * du).norm() <= 1e-10 * du.norm());

  CHECK_THROWS_AS(s.model.linearize(u + 0.1 * Vector::Ones(u.size()), m), InvalidArgument);
}

TEST_CASE("adjoint action satisfies the mass-weighted adjoint identity") {
  Setup s(12);
  RngStream rng(19);
  const Vector m = s.draw(rng);
  const Vector u = s.model.solve_forward(m).u.values;
  const Linearization lin = s.model.linearize(u, m);
  const auto& M = s.model.mass();
  for (int k = 0; k < 5; ++k) {
    const Vector dm = rng.normal_vector(s.mesh.n_nodes());
    const Vector w = rng.normal_vector(s.mesh.n_nodes());
    long t_solves = 0, a_solves = 0;
    const Vector du = lin.tangent(dm, &t_solves);
    const Vector g = lin.adjoint(w, &a_solves);
    const double lhs = du.dot(M * w);
    const double rhs = dm.dot(M * g);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
    CHECK(t_solves == a_solves);
  }
  CHECK(lin.adjoint(Vector::Zero(s.mesh.n_nodes())).norm() == 0.0);

  const Vector v = rng.normal_vector(s.mesh.n_nodes());
  const Vector Av = lin.normal_action(v);
  const Vector du = lin.tangent(v);
  CHECK(v.dot(Av) == doctest::Approx(du.dot(M * du)).epsilon(1e-9));
}
