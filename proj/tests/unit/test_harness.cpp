#include "maglap/harness.hpp"
#include "maglap/grid.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace maglap;
using maglap::testing::c;
using maglap::testing::x;

namespace {

Point pt(double a, double b) { return Point(Eigen::Vector2d(a, b)); }

SweepPlan constant_plan() {
  SweepPlan p;
  p.field = PolyMatrixField::planar(c(2, 1));
  p.beta_list = {0, 20, 60, 200};
  p.grid.nodes_per_length = 8;
  return p;
}

SweepRecord rec(double beta, double lambda) {
  SweepRecord r;
  r.beta = beta;
  r.lambda = lambda;
  return r;
}

}  // namespace

TEST_CASE("grid rule") {
  const DomainSpec sq = make_rectangle(pt(0.5, 0.5), pt(1, 1));
  GridRule g;
  CHECK(g.spacing(sq, 800, 0) == doctest::Approx(1.0 / 340));
  CHECK(g.spacing(sq, 0, 0) == doctest::Approx(1.0 / 32));     // min node count
  CHECK(g.spacing(sq, 1e9, 0) == doctest::Approx(1.0 / 512));  // max node count
  for (double beta : {10.0, 77.0, 1234.0}) {
    const double n = 1.0 / g.spacing(sq, beta, 1);
    CHECK(std::abs(n - std::round(n)) < 1e-9);
    CHECK(static_cast<long>(std::round(n)) % 2 == 0);
    CHECK(g.spacing(sq, beta, 1) <= std::pow(beta, -1.0 / 3) / 12 + 1e-12);
  }
  g.nodes_per_length = 0;
  CHECK_THROWS_AS(g.spacing(sq, 1, 0), HarnessError);
}

TEST_CASE("sweep plan validation and potential") {
  SweepPlan p = constant_plan();
  CHECK_NOTHROW(p.validate());
  p.beta_list = {10, 20};
  CHECK_THROWS_AS(p.validate(), HarnessError);
  p.beta_list = {10, 20, 50};
  CHECK_THROWS_AS(p.validate(), HarnessError);  // less than a decade
  p.beta_list = {10, 200, 100};
  CHECK_THROWS_AS(p.validate(), HarnessError);

  p.field = PolyMatrixField::planar(x(2, 0) * x(2, 1) + c(2, 2));
  const PolyMatrixField back = curl(p.potential());
  for (double a : {-0.3, 0.4})
    for (double b : {0.1, 0.9}) CHECK(back(0, 1)(pt(a, b)) == doctest::Approx(a * b + 2));

  // B_12 = x_3 alone is not closed in three dimensions
  SweepPlan q;
  q.domain = make_rectangle(Point::Zero(3), Eigen::Vector3d::Ones());
  q.field = PolyMatrixField::from_upper(3, {{{0, 1}, x(3, 2)}});
  CHECK_THROWS_AS(q.potential(), HarnessError);
}

TEST_CASE("fit_power_law") {
  std::vector<double> b, l, l2, k;
  for (int i = 0; i <= 8; ++i) {
    const double beta = std::pow(10.0, 2.0 + 0.25 * i);
    b.push_back(beta);
    l.push_back(3.0 * std::pow(beta, 2.0 / 3.0));
    l2.push_back(3.0 * std::pow(beta, 2.0 / 3.0) + std::pow(beta, 8.0 / 15.0));
    k.push_back(4.5);
  }
  const auto f = fit_power_law(b, l);
  CHECK(std::abs(f.exponent - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(f.prefactor - 3.0) < 1e-12 * 3.0);
  CHECK(std::isfinite(f.exponent_stderr));
  for (double p : f.consecutive) CHECK(std::abs(p - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(fit_power_law(b, l2).exponent - 2.0 / 3.0) < 0.03);
  CHECK(std::abs(fit_power_law(b, k).exponent) < 1e-12);
  CHECK(fit_power_law(b, k).prefactor == doctest::Approx(4.5));

  CHECK_THROWS_AS(fit_power_law({1, 2}, {1, 2}), HarnessError);
  CHECK_THROWS_AS(fit_power_law({1, 2, 3}, {1, -2, 3}), HarnessError);
  // beta = 0 records are skipped
  const auto g = fit_power_law(std::vector<SweepRecord>{rec(0, 19.7), rec(10, 20), rec(100, 200), rec(1000, 2000)});
  CHECK(g.exponent == doctest::Approx(1.0));
}

TEST_CASE("run_sweep") {
  const SweepPlan p = constant_plan();
  const auto r = run_sweep(p);
  REQUIRE(r.size() == 4);
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i].beta > r[i - 1].beta);
  // beta = 0 gives the field-free eigenvalue on the same grid
  const auto fs0 = assemble(build_grid(p.domain, r[0].h), PolyVectorField::zero(2), 0.0, p.bc);
  CHECK(r[0].lambda == doctest::Approx(ground_state(fs0).lambda).epsilon(1e-10));
  CHECK(r[0].lambda == doctest::Approx(2 * std::numbers::pi * std::numbers::pi).epsilon(0.005));
  // diamagnetic along the sweep, and self-convergence under halving h
  for (const auto& x : r) {
    CHECK(x.lambda >= r[0].lambda);
    CHECK(x.h_change() < 0.02);
  }

  SweepPlan q = p;
  q.threads = 2;
  const auto r2 = run_sweep(q);
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(r2[i].lambda == r[i].lambda);

  std::ostringstream os;
  write_sweep_csv(os, r);
  CHECK(os.str().rfind("beta,lambda,h,n_nodes,iterations,residual\n", 0) == 0);

  SweepPlan bad = p;
  bad.solver.max_iter = 1;
  bad.solver.tol = 1e-14;
  try {
    run_sweep(bad);
    FAIL("expected an error");
  } catch (const HarnessError& e) {
    CHECK(std::string(e.what()).find("beta=") == 0);
  }
}

TEST_CASE("quasimode upper bound") {
  const DomainSpec sq = make_rectangle(pt(0.5, 0.5), pt(1, 1));
  const PolyMatrixField b = PolyMatrixField::planar(c(2, 1));
  SweepPlan p = constant_plan();
  std::vector<double> betas, bounds;
  for (double beta : {50.0, 100.0, 200.0}) {
    const auto fs = assemble(build_grid(sq, p.grid.spacing(sq, beta, 0)), p.potential(), beta, p.bc);
    const double bound = quasimode_upper_bound(fs, p.potential(), pt(0.5, 0.5), 1 / std::sqrt(beta));
    CHECK(bound >= ground_state(fs).lambda);
    betas.push_back(beta);
    bounds.push_back(bound);
  }
  CHECK(fit_power_law(betas, bounds).exponent == doctest::Approx(1.0).epsilon(0.05));

  // linear field on its zero line grows like beta^{2/3}
  const DomainSpec box = make_rectangle(pt(0, 0), pt(2, 2));
  const PolyMatrixField m = PolyMatrixField::planar(x(2, 0));
  QuasimodeOptions qo;
  qo.grid.nodes_per_length = 8;
  betas.clear();
  bounds.clear();
  for (double beta : {100.0, 1000.0, 10000.0}) {
    betas.push_back(beta);
    bounds.push_back(quasimode_upper_bound(m, box, pt(0, 0), beta, qo));
  }
  CHECK(fit_power_law(betas, bounds).exponent <= 0.70);

  // boundary point, neumann: still an upper bound
  qo.bc = BoundaryCondition::neumann;
  const double nb = quasimode_upper_bound(b, sq, pt(0.5, 0.0), 100.0, qo);
  SweepPlan pn = constant_plan();
  const auto fsn = assemble(build_grid(sq, qo.grid.spacing(sq, 100.0, 0)), pn.potential(), 100.0,
                            BoundaryCondition::neumann);
  CHECK(nb >= ground_state(fsn).lambda);

  CHECK_THROWS_AS(quasimode_upper_bound(b, sq, pt(0.5, 0.05), 100.0), HarnessError);
  CHECK_THROWS_AS(quasimode_upper_bound(b, sq, pt(1.5, 0.5), 100.0), HarnessError);
}

TEST_CASE("verification reports") {
  SweepPlan p = constant_plan();
  std::vector<SweepRecord> r{rec(50, 50.5), rec(100, 100.6), rec(200, 200.4), rec(400, 400.1), rec(800, 800.2)};
  const auto lo = verify_leading_order(p, r, 0);
  CHECK(lo.pass);
  CHECK(lo.target == 1.0);
  CHECK(lo.tolerance == 0.05);
  const auto lo2 = verify_leading_order(p, r, 1);
  CHECK_FALSE(lo2.pass);
  CHECK(lo2.message.find("FAIL") != std::string::npos);

  GammaReport g;
  g.kappa_star = 0;
  g.kappa_0 = 2;
  p.bc = BoundaryCondition::dtn;
  const auto ld = verify_leading_order(p, r, g);
  CHECK(ld.target == doctest::Approx(0.25));
  CHECK(ld.tolerance == 0.07);

  ThetaCoefficients t;
  t.has_d = true;
  t.theta_d = 1.0;
  CHECK_THROWS_AS(verify_first_term(p, r, t, 0), HarnessError);
  p.bc = BoundaryCondition::dirichlet;
  const auto ft = verify_first_term(p, r, t, 0);
  CHECK(ft.pass);
  CHECK(ft.tolerance == 0.10);
  CHECK(ft.theta_hat == doctest::Approx(800.2 / 800));
  CHECK(ft.remainder_exponent == doctest::Approx(0.75));
  CHECK(ft.remainder_ratio.size() == 5);
  CHECK(verify_first_term(p, r, t, 1).remainder_exponent == doctest::Approx(8.0 / 15.0));
  CHECK(verify_first_term(p, r, t, 1).tolerance == 0.15);

  std::ostringstream os;
  write_fit_csv(os, lo, 1.0, true);
  CHECK(os.str().rfind("exponent,exponent_stderr,prefactor,prefactor_stderr,target_exponent,target_prefactor,pass\n",
                       0) == 0);
}

TEST_CASE("constant field first term end to end") {
  SweepPlan p = constant_plan();
  p.beta_list = {40, 130, 400};
  p.grid.nodes_per_length = 12;
  const auto r = run_sweep(p);
  ThetaCoefficients t;
  t.has_d = true;
  Eigen::MatrixXd bmat(2, 2);
  bmat << 0, 1, -1, 0;
  t.theta_d = tr_plus(bmat);
  CHECK(verify_leading_order(p, r, 0).pass);
  const auto ft = verify_first_term(p, r, t, 0);
  CHECK(ft.pass);
  CHECK(ft.rel_error < 0.02);
}

TEST_CASE("discrete scaling identity") {
  const PolyVectorField lin({-0.5 * x(2, 1), 0.5 * x(2, 0)});
  const PolyVectorField quad({Polynomial(2), 0.5 * x(2, 0) * x(2, 0)});
  SolverOptions opt;
  opt.tol = 1e-11;
  for (double beta : {7.0, 300.0}) {
    const auto [a, b] = scaling_pair(lin, 3.0, 3.0 / 40, beta, BoundaryCondition::dirichlet, opt);
    CHECK(std::abs(a - b) <= 1e-8 * std::abs(a));
    const auto [c2, d2] = scaling_pair(quad, 4.0, 4.0 / 40, beta, BoundaryCondition::neumann, opt);
    CHECK(std::abs(c2 - d2) <= 1e-8 * std::abs(c2));
  }
}

TEST_CASE("m weights") {
  const Grid g = build_grid(make_rectangle(pt(0, 0), pt(2, 2)), 0.25);
  const PolyMatrixField b = PolyMatrixField::planar(x(2, 0));
  const Eigen::VectorXd w = m_weights(g, b, 100.0);
  const PolyMatrixField scaled = PolyMatrixField::planar(100.0 * x(2, 0));
  for (int v : {0, 7, 40, 80}) CHECK(w[v] == doctest::Approx(std::pow(m_exact(scaled, g.position(v)), 2)).epsilon(1e-7));
  // constant field: m^2 = beta |B|, Frobenius norm sqrt(2)
  const Eigen::VectorXd wc = m_weights(g, PolyMatrixField::planar(c(2, 1)), 64.0);
  CHECK(wc.minCoeff() == doctest::Approx(64.0 * std::sqrt(2.0)).epsilon(1e-7));
  CHECK(wc.maxCoeff() == doctest::Approx(64.0 * std::sqrt(2.0)).epsilon(1e-7));
  CHECK_THROWS_AS(m_weights(g, b, 0.0), HarnessError);
}
