#include "maglap/harness.hpp"

#include "maglap/grid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

namespace maglap {

double GridRule::spacing(const DomainSpec& domain, double beta, int kappa) const {
  if (!(nodes_per_length > 0)) throw HarnessError("grid rule: nodes_per_length must be positive");
  if (min_nodes < 3 || max_nodes < min_nodes) throw HarnessError("grid rule: bad node bounds");
  const auto [lo, hi] = domain.bounding_box();
  const double L = (hi - lo).maxCoeff();
  const double scale = beta > 0 ? std::pow(beta, -1.0 / (kappa + 2)) : 1.0;
  const double target = scale / nodes_per_length;
  long n = static_cast<long>(std::ceil(L / target - 1e-9));
  n = std::max<long>(n, min_nodes - 1);
  n = std::min<long>(n, max_nodes - 1);
  if (n % 2 != 0) n = (n + 1 <= max_nodes - 1) ? n + 1 : n - 1;
  return L / static_cast<double>(n);
}

PolyVectorField SweepPlan::potential() const {
  const PolyVectorField a = radial_gauge_potential(field);
  // B must be closed for a potential to exist; compare curl A with B at a few points.
  const PolyMatrixField back = curl(a);
  const auto [lo, hi] = domain.bounding_box();
  const std::size_t d = field.dim();
  for (int k = 0; k < 7; ++k) {
    Point x(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      const double t = std::fmod(0.6180339887 * (k + 1) * (i + 1), 1.0);
      x[static_cast<Eigen::Index>(i)] = lo[static_cast<Eigen::Index>(i)] + t * (hi - lo)[static_cast<Eigen::Index>(i)];
    }
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t l = j + 1; l < d; ++l) {
        const double want = field(j, l)(x);
        if (std::abs(back(j, l)(x) - want) > 1e-9 * std::max(1.0, std::abs(want)))
          throw HarnessError("field is not closed (dB != 0); no vector potential");
      }
  }
  return a;
}

void SweepPlan::validate() const {
  if (field.dim() != domain.dim()) throw HarnessError("sweep plan: field and domain dimensions differ");
  if (beta_list.size() < 3) throw HarnessError("sweep plan: beta_list needs at least 3 entries");
  for (std::size_t i = 0; i < beta_list.size(); ++i) {
    if (!(beta_list[i] >= 0)) throw HarnessError("sweep plan: beta must be non-negative");
    if (i > 0 && !(beta_list[i] > beta_list[i - 1])) throw HarnessError("sweep plan: beta_list must increase");
  }
  double lo = 0;
  for (double b : beta_list)
    if (b > 0) {
      lo = b;
      break;
    }
  if (!(lo > 0) || beta_list.back() < 10.0 * lo * (1 - 1e-12))
    throw HarnessError("sweep plan: beta_list must span at least one decade");
  if (kappa < 0) throw HarnessError("sweep plan: kappa must be non-negative");
}

double SweepRecord::lambda_extrapolated() const {
  return std::isnan(lambda_coarse) ? lambda : (4.0 * lambda - lambda_coarse) / 3.0;
}

double SweepRecord::h_change() const {
  return std::isnan(lambda_coarse) ? lambda_coarse : std::abs(lambda - lambda_coarse) / std::abs(lambda);
}

namespace {

SpectralResult solve_at(const SweepPlan& plan, const PolyVectorField& a, double beta, double h) {
  const auto fs = assemble(build_grid(plan.domain, h), a, beta, plan.bc);
  return plan.bc == BoundaryCondition::dtn ? dtn_ground_state(fs, plan.solver) : ground_state(fs, plan.solver);
}

template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& f) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t width = std::clamp<std::size_t>(threads, 1, n);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < width; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<SweepRecord> run_sweep(const SweepPlan& plan) {
  plan.validate();
  const PolyVectorField a = plan.potential();
  std::vector<SweepRecord> out(plan.beta_list.size());
  parallel_for(out.size(), plan.threads, [&](std::size_t i) {
    const double beta = plan.beta_list[i];
    try {
      const double h = plan.grid.spacing(plan.domain, beta, plan.kappa);
      const SpectralResult r = solve_at(plan, a, beta, h);
      SweepRecord rec;
      rec.beta = beta;
      rec.lambda = r.lambda;
      rec.h = h;
      rec.n_nodes = r.n_dofs;
      rec.iterations = r.iterations;
      rec.residual = r.residual;
      if (plan.coarse_pass) rec.lambda_coarse = solve_at(plan, a, beta, 2.0 * h).lambda;
      out[i] = rec;
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "beta=" << beta << ": " << e.what();
      throw HarnessError(os.str());
    }
  });
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.beta < y.beta; });
  return out;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
  os << "beta,lambda,h,n_nodes,iterations,residual\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%zu,%d,%.17g\n", r.beta, r.lambda, r.h, r.n_nodes, r.iterations,
                  r.residual);
    os << buf;
  }
}

FitResult fit_power_law(const std::vector<double>& beta, const std::vector<double>& lambda) {
  if (beta.size() != lambda.size()) throw HarnessError("fit_power_law: size mismatch");
  const std::size_t n = beta.size();
  if (n < 3) throw HarnessError("fit_power_law: need at least 3 points");
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(beta[i] > 0)) throw HarnessError("fit_power_law: beta must be positive");
    if (!(lambda[i] > 0)) throw HarnessError("fit_power_law: non-positive lambda");
    x[i] = std::log(beta[i]);
    y[i] = std::log(lambda[i]);
  }
  const double xm = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double ym = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  if (!(sxx > 0)) throw HarnessError("fit_power_law: beta values must differ");
  FitResult f;
  f.exponent = sxy / sxx;
  const double b = ym - f.exponent * xm;
  double ssr = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (b + f.exponent * x[i]);
    f.residuals.push_back(r);
    ssr += r * r;
  }
  const double s2 = ssr / static_cast<double>(n - 2);
  f.exponent_stderr = std::sqrt(s2 / sxx);
  f.prefactor = std::exp(b);
  f.prefactor_stderr = f.prefactor * std::sqrt(s2 * (1.0 / static_cast<double>(n) + xm * xm / sxx));
  for (std::size_t i = 0; i + 1 < n; ++i) f.consecutive.push_back((y[i + 1] - y[i]) / (x[i + 1] - x[i]));
  return f;
}

FitResult fit_power_law(const std::vector<SweepRecord>& records) {
  std::vector<double> b, l;
  for (const auto& r : records) {
    if (r.beta == 0) continue;
    b.push_back(r.beta);
    l.push_back(r.lambda);
  }
  return fit_power_law(b, l);
}

namespace {

// Smooth radial cutoff: 1 on [0, 1/2], 0 on [1, inf).
double bump(double s) {
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  auto f = [](double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; };
  const double t = 2.0 * (s - 0.5);
  return f(1.0 - t) / (f(1.0 - t) + f(t));
}

}  // namespace

double quasimode_upper_bound(const FormSet& fs, const PolyVectorField& a, const Point& y, double r) {
  if (!(r > 0)) throw HarnessError("quasimode: radius must be positive");
  const Grid& g = *fs.grid;
  const Eigen::VectorXd& mass = fs.bc == BoundaryCondition::dtn ? fs.m_bnd : fs.m;
  Eigen::VectorXcd v(fs.dofs());
  double den = 0;
  for (Eigen::Index k = 0; k < fs.dofs(); ++k) {
    const Point x = g.position(fs.dof_node[static_cast<std::size_t>(k)]);
    const double chi = bump((x - y).norm() / r);
    v[k] = chi == 0.0 ? std::complex<double>(0) : chi * std::polar(1.0, -link_phase(a, y, x, fs.beta));
    den += mass[k] * chi * chi;
  }
  if (!(den > 0)) throw HarnessError("quasimode: trial function misses every active node; refine the grid");
  return fs.energy(v) / den;
}

double quasimode_upper_bound(const PolyMatrixField& field, const DomainSpec& domain, const Point& y, double beta,
                             const QuasimodeOptions& opt) {
  if (!(beta > 0)) throw HarnessError("quasimode: beta must be positive");
  const auto vo = vanishing_order(field, y, opt.tol);
  if (!vo.finite()) throw HarnessError("quasimode: " + vo.describe());
  const double r = std::pow(beta, -1.0 / (vo.kappa + 2));
  const auto [lo, hi] = domain.bounding_box();
  const double eps = 1e-9 * std::max(1.0, (hi - lo).norm());
  const double dist = distance_to_boundary(domain, y);
  if (dist > eps) {
    if (r > dist) throw HarnessError("quasimode: radius exceeds distance to boundary");
  } else if (dist < -eps) {
    throw HarnessError("quasimode: point lies outside the domain");
  }
  SweepPlan plan;
  plan.field = field;
  plan.domain = domain;
  const double h = opt.grid.spacing(domain, beta, vo.kappa);
  const auto fs = assemble(build_grid(domain, h), plan.potential(), beta, opt.bc);
  return quasimode_upper_bound(fs, plan.potential(), y, r);
}

double target_exponent(BoundaryCondition bc, int kappa) {
  return (bc == BoundaryCondition::dtn ? 1.0 : 2.0) / (kappa + 2);
}

LeadingOrderReport verify_leading_order(const SweepPlan& plan, const std::vector<SweepRecord>& records, int kappa,
                                        double tolerance) {
  LeadingOrderReport rep;
  rep.target = target_exponent(plan.bc, kappa);
  rep.tolerance = tolerance >= 0 ? tolerance : (plan.bc == BoundaryCondition::dtn ? 0.07 : 0.05);
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  try {
    rep.fit = fit_power_law(records);
    rep.pass = std::abs(rep.fit.exponent - rep.target) <= rep.tolerance;
    os << "exponent " << rep.fit.exponent << " +- " << rep.fit.exponent_stderr << " target " << rep.target
       << " tol " << rep.tolerance << (rep.pass ? " PASS" : " FAIL");
  } catch (const std::exception& e) {
    rep.pass = false;
    os << "exponent fit failed: " << e.what() << " FAIL";
  }
  rep.message = os.str();
  return rep;
}

LeadingOrderReport verify_leading_order(const SweepPlan& plan, const std::vector<SweepRecord>& records,
                                        const GammaReport& gamma, double tolerance) {
  return verify_leading_order(plan, records, plan.bc == BoundaryCondition::dtn ? gamma.kappa_0 : gamma.kappa_star,
                              tolerance);
}

FirstTermReport verify_first_term(const SweepPlan& plan, const std::vector<SweepRecord>& records,
                                  const ThetaCoefficients& theta, int kappa, double tolerance) {
  FirstTermReport rep;
  switch (plan.bc) {
    case BoundaryCondition::dirichlet:
      if (!theta.has_d) throw HarnessError("verify_first_term: bc mismatch, no dirichlet coefficient");
      rep.theta = theta.theta_d;
      break;
    case BoundaryCondition::neumann:
      if (!theta.has_n) throw HarnessError("verify_first_term: bc mismatch, no neumann coefficient");
      rep.theta = theta.theta_n;
      break;
    case BoundaryCondition::dtn:
      if (!theta.has_dn) throw HarnessError("verify_first_term: bc mismatch, no dtn coefficient");
      rep.theta = theta.theta_dn;
      break;
    default:
      throw HarnessError("verify_first_term: bc mismatch, no coefficient for " + to_string(plan.bc));
  }
  if (records.empty()) throw HarnessError("verify_first_term: empty sweep");
  rep.exponent = target_exponent(plan.bc, kappa);
  const bool dtn = plan.bc == BoundaryCondition::dtn;
  rep.tolerance = tolerance >= 0 ? tolerance : (kappa == 0 && !dtn ? 0.10 : 0.15);
  const SweepRecord& top = records.back();
  rep.theta_hat = top.lambda_extrapolated() / std::pow(top.beta, rep.exponent);
  rep.rel_error = std::abs(rep.theta_hat - rep.theta) / std::abs(rep.theta);
  rep.pass = rep.rel_error <= rep.tolerance;
  rep.remainder_exponent =
      dtn ? (kappa + 3.0) / ((kappa + 2.0) * (kappa + 4.0)) : rep.exponent / 2.0 + 1.0 / (kappa + 4.0);
  for (const auto& r : records)
    if (r.beta > 0)
      rep.remainder_ratio.push_back((r.lambda_extrapolated() - rep.theta * std::pow(r.beta, rep.exponent)) /
                                    std::pow(r.beta, rep.remainder_exponent));
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << "prefactor " << rep.theta_hat << " vs " << rep.theta << " rel " << rep.rel_error << " tol " << rep.tolerance
     << (rep.pass ? " PASS" : " FAIL");
  rep.message = os.str();
  return rep;
}

void write_fit_csv(std::ostream& os, const LeadingOrderReport& report, double target_prefactor, bool pass) {
  os << "exponent,exponent_stderr,prefactor,prefactor_stderr,target_exponent,target_prefactor,pass\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", report.fit.exponent,
                report.fit.exponent_stderr, report.fit.prefactor, report.fit.prefactor_stderr, report.target,
                target_prefactor, pass ? 1 : 0);
  os << buf;
}

Eigen::VectorXd m_weights(const Grid& grid, const PolyMatrixField& field, double beta, const MExactOptions& opt) {
  if (!(beta > 0)) throw HarnessError("m_weights: beta must be positive");
  const FieldNormEvaluator ev(field, beta);
  Eigen::VectorXd w(static_cast<Eigen::Index>(grid.size()));
  double guess = 0.0;  // neighbouring nodes have close values; seed the bracket with the last one
  for (std::size_t v = 0; v < grid.size(); ++v) {
    guess = m_exact(ev, grid.position(static_cast<int>(v)), guess, opt);
    w[static_cast<Eigen::Index>(v)] = guess * guess;
  }
  return w;
}

std::pair<double, double> scaling_pair(const PolyVectorField& a_hom, double side, double h, double beta,
                                       BoundaryCondition bc, const SolverOptions& opt) {
  const int kappa = homogeneous_order(a_hom) - 1;
  const auto d = static_cast<Eigen::Index>(a_hom.dim());
  const double s = std::pow(beta, -1.0 / (kappa + 2));
  auto solve = [&](double L, double spacing, double b) {
    const auto fs = assemble(build_grid(make_rectangle(Point::Zero(d), Eigen::VectorXd::Constant(d, L)), spacing),
                             a_hom, b, bc);
    return (bc == BoundaryCondition::dtn ? dtn_ground_state(fs, opt) : ground_state(fs, opt)).lambda;
  };
  const double base = solve(side, h, 1.0);
  const double scaled = solve(s * side, s * h, beta);
  return {std::pow(beta, 2.0 / (kappa + 2)) * base, scaled};
}

}  // namespace maglap
