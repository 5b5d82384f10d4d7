// One line per acceptance criterion: "criterion N: PASS|FAIL <measurements>".

#include "maglap/assemble.hpp"
#include "maglap/field_core.hpp"
#include "maglap/geometry.hpp"
#include "maglap/grid.hpp"
#include "maglap/harness.hpp"
#include "maglap/model_problems.hpp"
#include "maglap/spectral.hpp"

#include <CLI11.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>

using namespace maglap;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Polynomial X(std::size_t d, std::size_t k) { return Polynomial::coordinate(d, k); }
Polynomial C(std::size_t d, double v) { return Polynomial::constant(d, v); }
Point pt(double a, double b) { return Point(Eigen::Vector2d(a, b)); }

DomainSpec unit_square() { return make_rectangle(pt(0.5, 0.5), pt(1, 1)); }
DomainSpec centered_square() { return make_rectangle(pt(0, 0), pt(2, 2)); }

Polynomial random_polynomial(std::mt19937_64& rng, std::size_t dim, int degree, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Polynomial p(dim);
  for (int k = 0; k <= degree; ++k)
    for (const auto& alpha : multi_indices_of_order(dim, k)) p.add_term(alpha, u(rng));
  return p;
}

Eigen::VectorXd dense_spectrum(const FormSet& fs) {
  const Eigen::VectorXd s = fs.m.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXcd a = s.asDiagonal() * Eigen::MatrixXcd(fs.q) * s.asDiagonal();
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(a, Eigen::EigenvaluesOnly).eigenvalues();
}

SweepPlan plan_for(PolyMatrixField field, DomainSpec domain, BoundaryCondition bc, std::vector<double> betas) {
  SweepPlan p;
  p.field = std::move(field);
  p.domain = std::move(domain);
  p.bc = bc;
  p.beta_list = std::move(betas);
  return p;
}

int gamma_kappa(const SweepPlan& p) {
  const GammaReport g = classify_gamma(p.field, p.domain);
  return p.bc == BoundaryCondition::dtn ? g.kappa_0 : g.kappa_star;
}

std::string consecutive(const FitResult& f) {
  std::string s;
  for (double c : f.consecutive) s += fmt("%s%.3f", s.empty() ? "" : " ", c);
  return s;
}

Outcome exponent_check(SweepPlan p) {
  p.kappa = gamma_kappa(p);
  const auto rec = run_sweep(p);
  const auto rep = verify_leading_order(p, rec, p.kappa);
  return {rep.pass, fmt("exponent %.4f +- %.4f target %.4f tol %.2f; local slopes %s", rep.fit.exponent,
                        rep.fit.exponent_stderr, rep.target, rep.tolerance, consecutive(rep.fit).c_str())};
}

Outcome criterion1() {
  const auto fs = assemble(build_grid(unit_square(), 1.0 / 128), PolyVectorField::zero(2), 0.0,
                           BoundaryCondition::dirichlet);
  const double lambda = ground_state(fs).lambda;
  const double exact = 2 * std::numbers::pi * std::numbers::pi;
  const double rel = std::abs(lambda - exact) / exact;
  return {rel <= 0.005, fmt("lambda %.6f vs 2 pi^2 = %.6f, rel %.2e (tol 5e-3)", lambda, exact, rel)};
}

Outcome criterion2() {
  SweepPlan p = plan_for(PolyMatrixField::planar(C(2, 1)), unit_square(), BoundaryCondition::dirichlet,
                         {50, 100, 200, 400, 800});
  p.kappa = gamma_kappa(p);
  const auto rec = run_sweep(p);
  const auto rep = verify_leading_order(p, rec, p.kappa);
  const double ratio = rec.back().lambda_extrapolated() / rec.back().beta;
  const bool ok = rep.pass && ratio >= 0.90 && ratio <= 1.10;
  return {ok, fmt("exponent %.4f +- %.4f target 1 tol 0.05; lambda/beta at %g after Richardson %.5f in [0.90, 1.10]",
                  rep.fit.exponent, rep.fit.exponent_stderr, rec.back().beta, ratio)};
}

Outcome criterion3() {
  return exponent_check(plan_for(PolyMatrixField::planar(X(2, 0)), centered_square(), BoundaryCondition::dirichlet,
                                 {400, 800, 1600, 3200, 6400}));
}

Outcome criterion4() {
  return exponent_check(plan_for(PolyMatrixField::planar(X(2, 0) * X(2, 0)), centered_square(),
                                 BoundaryCondition::dirichlet, {1e3, std::pow(10.0, 3.5), 1e4, std::pow(10.0, 4.5), 1e5}));
}

Outcome criterion5() {
  const Outcome a = exponent_check(
      plan_for(PolyMatrixField::planar(C(2, 1)), unit_square(), BoundaryCondition::dtn, {50, 100, 200, 400, 800}));
  const Outcome b = exponent_check(
      plan_for(PolyMatrixField::planar(X(2, 0)), centered_square(), BoundaryCondition::dtn, {50, 100, 200, 400, 800}));
  return {a.pass && b.pass, "constant: " + a.detail + " | linear: " + b.detail};
}

Outcome criterion6() {
  SweepPlan p = plan_for(PolyMatrixField::planar(X(2, 0)), centered_square(), BoundaryCondition::dirichlet,
                         {400, 800, 1600, 3200, 6400});
  const GammaReport gamma = classify_gamma(p.field, p.domain);
  p.kappa = gamma.kappa_star;
  const auto rec = run_sweep(p);
  ThetaOptions opt;
  opt.neumann = false;
  opt.dtn = false;
  const ThetaCoefficients theta = theta_coefficients(p.field, p.domain, gamma, opt);
  const auto rep = verify_first_term(p, rec, theta, p.kappa);
  double whole = NAN, boundary = INFINITY;
  for (const auto& ev : theta.evaluations) {
    if (ev.branch == "interior") whole = ev.value;
    else boundary = std::min(boundary, ev.value);
  }
  const double reduced = montgomery_reduced(1.0).energy;
  const double agree = std::abs(whole - reduced) / reduced;
  const bool ok = rep.pass && agree <= 0.02;
  return {ok, fmt("theta_hat %.4f vs Theta_D %.4f (%s branch) rel %.4f tol %.2f; whole-space %.5f vs reduced 1D %.5f "
                  "(rel %.1e, tol 2e-2); boundary half-plane min %.5f",
                  rep.theta_hat, rep.theta, theta.branch_d.c_str(), rep.rel_error, rep.tolerance, whole, reduced,
                  agree, boundary)};
}

Outcome criterion7() {
  ModelProblemSpec s;
  s.a_hom = PolyVectorField({-0.5 * X(3, 1), 0.5 * X(3, 0), Polynomial(3)});
  s.r_list = {4, 6, 8, 12};
  s.h_rule.kind = SpacingRule::Kind::per_unit;
  s.h_rule.value = 2;
  const auto est = lambda_whole_space(s);
  std::vector<double> r, d;
  std::string pts;
  for (const auto& p : est.points) {
    r.push_back(p.R);
    d.push_back(p.lambda - est.lambda_inf);
    pts += fmt(" R=%g:%.5f", p.R, p.lambda);
  }
  const double slope = fit_power_law(r, d).exponent;
  return {std::abs(slope + 2.0) <= 0.3,
          fmt("slope %.4f target -2 tol 0.3; lambda_inf %.5f C %.4f;%s", slope, est.lambda_inf, est.decay_coefficient,
              pts.c_str())};
}

Outcome criterion8() {
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> ub(1.0, 30.0), ua(0.0, 2 * std::numbers::pi);
  double worst = 0;
  const BoundaryCondition bcs[] = {BoundaryCondition::dirichlet, BoundaryCondition::neumann, BoundaryCondition::mixed};
  for (int k = 0; k < 20; ++k) {
    const PolyVectorField a({random_polynomial(rng, 2, 2, 1.0), random_polynomial(rng, 2, 2, 1.0)});
    const PolyVectorField a2 = a + gradient(random_polynomial(rng, 2, 3, 2.0));
    const double beta = ub(rng);
    const BoundaryCondition bc = bcs[k % 3];
    DomainSpec dom = unit_square();
    if (bc == BoundaryCondition::mixed) {
      const double t = ua(rng);
      dom = make_half_space_box(pt(std::cos(t), std::sin(t)), 1.0);
    } else if (k % 2) {
      dom = make_disk(pt(0, 0), 1.0);
    }
    const auto g = std::make_shared<const Grid>(build_grid(dom, bc == BoundaryCondition::mixed ? 1.0 / 8 : 1.0 / 10));
    const Eigen::VectorXd s1 = dense_spectrum(assemble(g, a, beta, bc));
    const Eigen::VectorXd s2 = dense_spectrum(assemble(g, a2, beta, bc));
    worst = std::max(worst, (s1 - s2).cwiseAbs().maxCoeff() / s1.cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-10, fmt("20 cases, max relative spectral difference %.2e (tol 1e-10)", worst)};
}

Outcome criterion9() {
  std::mt19937_64 rng(0x5eed + 9);
  std::uniform_real_distribution<double> ub(0.5, 20.0), ua(0.0, 2 * std::numbers::pi);
  SolverOptions opt;
  opt.tol = 1e-10;
  int violations = 0;
  double margin = INFINITY;
  for (int k = 0; k < 50; ++k) {
    const PolyVectorField a({random_polynomial(rng, 2, 2, 2.0), random_polynomial(rng, 2, 2, 2.0)});
    const double beta = ub(rng), t = ua(rng);
    const auto g = std::make_shared<const Grid>(build_grid(make_half_space_box(pt(std::cos(t), std::sin(t)), 1.0), 0.0625));
    const double mmin = g->mass().minCoeff();
    const auto n = ground_state(assemble(g, a, beta, BoundaryCondition::neumann), opt);
    const auto m = ground_state(assemble(g, a, beta, BoundaryCondition::mixed), opt);
    const auto d = ground_state(assemble(g, a, beta, BoundaryCondition::dirichlet), opt);
    const auto d0 = ground_state(assemble(g, a, 0.0, BoundaryCondition::dirichlet), opt);
    auto slack = [&](const SpectralResult& x, const SpectralResult& y) {
      return (x.residual + y.residual) / mmin + 1e-10 * std::abs(y.lambda);
    };
    const double gaps[] = {m.lambda - n.lambda + slack(n, m), d.lambda - m.lambda + slack(m, d),
                           d.lambda - d0.lambda + slack(d0, d)};
    for (double gap : gaps) {
      if (gap < 0) ++violations;
      margin = std::min(margin, gap);
    }
  }
  return {violations == 0, fmt("50 cases, %d violations; smallest slack-adjusted gap %.3e", violations, margin)};
}

Outcome criterion10() {
  SweepPlan p = plan_for(PolyMatrixField::planar(X(2, 0)), centered_square(), BoundaryCondition::dirichlet, {});
  p.kappa = 1;
  p.grid.nodes_per_length = 8;
  const PolyVectorField a = p.potential();
  std::vector<double> cs;
  std::string s;
  for (double beta : {1e2, 1e3, 1e4}) {
    const auto g = std::make_shared<const Grid>(build_grid(p.domain, p.grid.spacing(p.domain, beta, p.kappa)));
    const double c = lower_bound_ratio(assemble(g, a, beta, p.bc), m_weights(*g, p.field, beta));
    cs.push_back(c);
    s += fmt(" c(%g)=%.4f", beta, c);
  }
  const double lo = *std::min_element(cs.begin(), cs.end()), hi = *std::max_element(cs.begin(), cs.end());
  return {lo >= 0.5 * hi, fmt("min/max %.4f (floor 0.5);%s", lo / hi, s.c_str())};
}

Outcome criterion11() {
  std::vector<PolyMatrixField> fields{
      PolyMatrixField::planar(C(2, 1)),
      PolyMatrixField::planar(X(2, 0)),
      PolyMatrixField::planar(X(2, 0) * X(2, 0)),
      PolyMatrixField::planar(X(2, 0) * X(2, 0) + X(2, 1) * X(2, 1)),
      PolyMatrixField::planar(X(2, 0) * X(2, 1) + 0.5 * X(2, 1) * X(2, 1) * X(2, 1) - C(2, 0.1)),
      PolyMatrixField::from_upper(3, {{{0, 1}, X(3, 2)}, {{1, 2}, X(3, 0) * X(3, 1)}}),
  };
  std::mt19937_64 rng(0x5eed + 11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 1.0, rmin = INFINITY, rmax = 0;
  for (const auto& b : fields) {
    for (int k = 0; k < 200; ++k) {
      Point x(static_cast<Eigen::Index>(b.dim()));
      for (auto& v : x) v = u(rng);
      const double r = m_exact(b, x) / m_tilde(b, x);
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
      worst = std::max({worst, r, 1.0 / r});
    }
  }
  return {worst <= 10.0,
          fmt("6 fields x 200 points: m/m_tilde in [%.4f, %.4f], comparability constant %.4f (tol 10)", rmin, rmax,
              worst)};
}

Outcome criterion12() {
  const std::vector<PolyVectorField> models{
      PolyVectorField({-0.5 * X(2, 1), 0.5 * X(2, 0)}),
      PolyVectorField({Polynomial(2), 0.5 * X(2, 0) * X(2, 0)}),
      PolyVectorField({X(2, 1) * X(2, 1), X(2, 0) * X(2, 1)}),
      PolyVectorField({Polynomial(2), (1.0 / 3.0) * (X(2, 0) * X(2, 0) * X(2, 0)) + X(2, 0) * X(2, 1) * X(2, 1)}),
  };
  SolverOptions opt;
  opt.tol = 1e-11;
  double worst = 0;
  int cases = 0;
  for (const auto& a : models)
    for (double beta : {5.0, 50.0, 500.0})
      for (auto bc : {BoundaryCondition::dirichlet, BoundaryCondition::neumann}) {
        const auto [base, scaled] = scaling_pair(a, 4.0, 4.0 / 48, beta, bc, opt);
        worst = std::max(worst, std::abs(base - scaled) / std::abs(base));
        ++cases;
      }
  return {worst <= 1e-8, fmt("%d cases, max relative deviation %.2e (tol 1e-8)", cases, worst)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-12)")->check(CLI::Range(0, 12));
  CLI11_PARSE(app, argc, argv);

  const std::map<int, std::function<Outcome()>> table{
      {1, criterion1}, {2, criterion2},   {3, criterion3},   {4, criterion4},   {5, criterion5},   {6, criterion6},
      {7, criterion7}, {8, criterion8},   {9, criterion9},   {10, criterion10}, {11, criterion11}, {12, criterion12},
  };
  bool all = true;
  for (const auto& [id, run] : table) {
    if (only != 0 && id != only) continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %d: %s %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
