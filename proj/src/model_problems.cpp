#include "maglap/model_problems.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>

namespace maglap {

int homogeneous_order(const PolyVectorField& a) {
  const int deg = a.degree();
  if (deg < 1) throw ModelError("model potential must be a nonzero homogeneous polynomial of degree >= 1");
  for (const auto& c : a.components())
    if (!c.is_zero() && !c.is_homogeneous(deg)) throw ModelError("model potential is not homogeneous");
  return deg;
}

PolyVectorField rotate_potential(const PolyVectorField& a, const Eigen::MatrixXd& q) {
  const std::size_t d = a.dim();
  const Eigen::MatrixXd qt = q.transpose();
  std::vector<Polynomial> pulled;
  for (const auto& c : a.components()) pulled.push_back(c.composed_linear(qt));
  std::vector<Polynomial> out(d, Polynomial(d));
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k)
      if (q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) != 0.0)
        out[j] = out[j] + q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) * pulled[k];
  return PolyVectorField(std::move(out));
}

namespace {

void fit_truncation(ModelEstimate& est) {
  const auto& pts = est.points;
  const double n = static_cast<double>(pts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : pts) {
    const double x = 1.0 / (p.R * p.R);
    sx += x;
    sy += p.lambda;
    sxx += x * x;
    sxy += x * p.lambda;
  }
  const double det = n * sxx - sx * sx;
  est.decay_coefficient = (n * sxy - sx * sy) / det;
  est.lambda_inf = (sy - est.decay_coefficient * sx) / n;
  double ssr = 0;
  for (const auto& p : pts) {
    const double r = p.lambda - (est.lambda_inf + est.decay_coefficient / (p.R * p.R));
    ssr += r * r;
  }
  est.error_bar = pts.size() > 2 ? std::sqrt(ssr / (n - 2)) : 0.0;

  // Localized ground states converge much faster than R^-2; the fit then overshoots.
  const std::size_t k = pts.size();
  const double d1 = pts[k - 3].lambda - pts[k - 2].lambda;
  const double d2 = pts[k - 2].lambda - pts[k - 1].lambda;
  auto inv2 = [](double r) { return 1.0 / (r * r); };
  const double predicted = (inv2(pts[k - 2].R) - inv2(pts[k - 1].R)) / (inv2(pts[k - 3].R) - inv2(pts[k - 2].R));
  if (d1 > 0 && std::abs(d2) < 0.5 * predicted * d1) {
    est.lambda_inf = pts[k - 1].lambda;
    est.error_bar = std::abs(d2);
    est.decay_coefficient = 0.0;
    est.fast_decay = true;
  }
}

void check_monotone(const ModelEstimate& est) {
  for (std::size_t i = 1; i < est.points.size(); ++i) {
    const auto& a = est.points[i - 1];
    const auto& b = est.points[i];
    const double slack = 1e-6 * std::abs(a.lambda) + 10.0 * (a.residual + b.residual);
    if (b.lambda > a.lambda + slack) {
      std::ostringstream os;
      os << "truncation inconsistent: lambda(R=" << b.R << ")=" << b.lambda << " exceeds lambda(R=" << a.R
         << ")=" << a.lambda;
      throw ModelError(os.str());
    }
  }
}

void validate(const ModelProblemSpec& spec) {
  homogeneous_order(spec.a_hom);
  if (spec.r_list.size() < 3) throw ModelError("model problems need at least three truncation sizes");
  for (std::size_t i = 0; i < spec.r_list.size(); ++i) {
    if (!(spec.r_list[i] > 0)) throw ModelError("truncation sizes must be positive");
    if (i > 0 && !(spec.r_list[i] > spec.r_list[i - 1])) throw ModelError("truncation sizes must increase");
  }
}

TruncationPoint solve_one(const DomainSpec& dom, double R, const ModelProblemSpec& spec, const PolyVectorField& a,
                          BoundaryCondition bc) {
  const double h = spec.h_rule.h(R);
  const auto fs = assemble(build_grid(dom, h), a, 1.0, bc);
  const SpectralResult r = bc == BoundaryCondition::dtn ? dtn_ground_state(fs, spec.solver) : ground_state(fs, spec.solver);
  return {R, h, r.lambda, r.residual, r.n_dofs};
}

}  // namespace

ModelEstimate lambda_whole_space(const ModelProblemSpec& spec) {
  if (spec.setting != ModelSetting::whole_space) throw ModelError("lambda_whole_space: setting must be whole_space");
  validate(spec);
  const auto d = static_cast<Eigen::Index>(spec.a_hom.dim());
  ModelEstimate est;
  for (double R : spec.r_list) {
    const auto dom = make_rectangle(Point::Zero(d), Eigen::VectorXd::Constant(d, 2.0 * R));
    est.points.push_back(solve_one(dom, R, spec, spec.a_hom, BoundaryCondition::dirichlet));
  }
  check_monotone(est);
  fit_truncation(est);
  return est;
}

ModelEstimate lambda_half_space(const ModelProblemSpec& spec) {
  if (spec.setting != ModelSetting::half_space) throw ModelError("lambda_half_space: setting must be half_space");
  validate(spec);
  const auto d = static_cast<Eigen::Index>(spec.a_hom.dim());
  if (spec.normal.size() != d || std::abs(spec.normal.norm() - 1.0) > 1e-12)
    throw ModelError("lambda_half_space: normal must be a unit vector of the model dimension");
  const PolyVectorField a = rotate_potential(spec.a_hom, half_space_frame(spec.normal));
  Eigen::VectorXd down = Eigen::VectorXd::Zero(d);
  down[d - 1] = -1.0;
  BoundaryCondition bc = spec.bc;
  if (bc == BoundaryCondition::neumann) bc = BoundaryCondition::mixed;
  ModelEstimate est;
  for (double R : spec.r_list) est.points.push_back(solve_one(make_half_space_box(down, R), R, spec, a, bc));
  check_monotone(est);
  fit_truncation(est);
  return est;
}

ModelEstimate solve_model(const ModelProblemSpec& spec) {
  return spec.setting == ModelSetting::whole_space ? lambda_whole_space(spec) : lambda_half_space(spec);
}

double tr_plus(const Eigen::MatrixXd& b) {
  if (b.rows() != b.cols()) throw ModelError("tr_plus: square matrix expected");
  if ((b + b.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff()))
    throw ModelError("tr_plus: matrix is not antisymmetric");
  return 0.5 * Eigen::JacobiSVD<Eigen::MatrixXd>(b).singularValues().sum();
}

namespace {

// Lowest eigenvalue of -d^2/dt^2 + (b t^2/2 - xi)^2 on (-L, L) with Dirichlet ends,
// second-order differences, Richardson-extrapolated from n and n/2 intervals.
double montgomery_band(double b, double xi, double L, int n) {
  auto lowest = [&](int m) {
    const double h = 2.0 * L / m;
    Eigen::VectorXd diag(m - 1), off = Eigen::VectorXd::Constant(m - 2, -1.0 / (h * h));
    for (int i = 1; i < m; ++i) {
      const double t = -L + i * h;
      const double v = 0.5 * b * t * t - xi;
      diag[i - 1] = 2.0 / (h * h) + v * v;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
  };
  return (4.0 * lowest(n) - lowest(n / 2)) / 3.0;
}

}  // namespace

MontgomeryResult montgomery_reduced(double b) {
  if (!(b > 0)) throw ModelError("montgomery_reduced: b must be positive");
  const double scale = std::cbrt(b);  // t ~ scale^{-1}, xi ~ scale, energy ~ scale^2
  const double L = 10.0 / scale;
  const int n = 800;
  double lo = -1.0 * scale, hi = 3.0 * scale;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = montgomery_band(b, x1, L, n), f2 = montgomery_band(b, x2, L, n);
  const double a0 = lo, b0 = hi;
  for (int it = 0; it < 60 && hi - lo > 1e-7 * scale; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = montgomery_band(b, x1, L, n);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = montgomery_band(b, x2, L, n);
    }
  }
  MontgomeryResult r;
  r.xi = 0.5 * (lo + hi);
  r.energy = montgomery_band(b, r.xi, L, n);
  if (r.xi - a0 < 1e-3 * scale || b0 - r.xi < 1e-3 * scale)
    throw ModelError("montgomery_reduced: minimizer at the edge of the search interval");
  const double wall = 0.5 * b * L * L - r.xi;
  if (wall * wall < 100.0 * r.energy) throw ModelError("montgomery_reduced: interval too small");
  return r;
}

namespace {

std::string model_key(const PolyMatrixField& p, const Eigen::VectorXd& normal, BoundaryCondition bc) {
  std::ostringstream os;
  os.precision(10);
  const std::size_t d = p.dim();
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t l = j + 1; l < d; ++l) os << p(j, l).to_string() << ';';
  for (Eigen::Index k = 0; k < normal.size(); ++k) os << normal[k] << ',';
  os << to_string(bc);
  return os.str();
}

std::vector<GammaPoint> subsample(const std::vector<GammaPoint>& pts, std::size_t max_points) {
  if (pts.size() <= max_points || max_points == 0) return pts;
  std::vector<GammaPoint> out;
  for (std::size_t i = 0; i < max_points; ++i) {
    const std::size_t k = (max_points == 1) ? pts.size() / 2 : i * (pts.size() - 1) / (max_points - 1);
    out.push_back(pts[k]);
  }
  return out;
}

}  // namespace

ThetaCoefficients theta_coefficients(const PolyMatrixField& b, const DomainSpec& domain, const GammaReport& gamma,
                                     const ThetaOptions& opt) {
  if (b.dim() != domain.dim()) throw ModelError("theta_coefficients: field and domain dimensions differ");
  ThetaCoefficients out;
  std::map<std::string, ThetaEvaluation> cache;

  auto evaluate = [&](const GammaPoint& gp, const std::string& branch, BoundaryCondition bc) -> const ThetaEvaluation& {
    const ModelData raw = taylor_model(b, gp.x);
    const ModelData md = normalize_model(raw);
    const Eigen::VectorXd normal = branch == "interior" ? Eigen::VectorXd() : gp.normal;
    const std::string key = model_key(md.p, normal, bc);
    auto it = cache.find(key);
    if (it == cache.end()) {
      ModelProblemSpec spec;
      spec.a_hom = md.a_model;
      spec.r_list = opt.r_list;
      spec.h_rule = opt.h_rule;
      spec.solver = opt.solver;
      spec.bc = bc;
      if (branch == "interior") {
        spec.setting = ModelSetting::whole_space;
      } else {
        spec.setting = ModelSetting::half_space;
        spec.normal = gp.normal;
      }
      ThetaEvaluation ev;
      ev.estimate = solve_model(spec);
      const double c = 1.0 / md.normalization;
      const double expo = (bc == BoundaryCondition::dtn ? 1.0 : 2.0) / (md.kappa + 2);
      ev.value = std::pow(c, expo) * ev.estimate.lambda_inf;
      ev.kappa = md.kappa;
      it = cache.emplace(key, std::move(ev)).first;
    }
    ThetaEvaluation ev = it->second;
    ev.y = gp.x;
    ev.branch = branch;
    ev.bc = bc;
    out.evaluations.push_back(ev);
    return out.evaluations.back();
  };

  auto consider = [](double v, const ThetaEvaluation& ev, bool& has, double& theta, Point& arg, std::string& br) {
    if (!has || v < theta) {
      has = true;
      theta = v;
      arg = ev.y;
      br = ev.branch;
    }
  };

  if (opt.dirichlet || opt.neumann) {
    if (gamma.gamma1.empty() && gamma.gamma2.empty()) throw ModelError("theta_coefficients: empty Gamma_1 and Gamma_2");
    for (const auto& gp : subsample(gamma.gamma1, opt.max_points)) {
      const auto& ev = evaluate(gp, "interior", BoundaryCondition::dirichlet);
      const double v = ev.value;
      const ThetaEvaluation copy = ev;
      if (opt.dirichlet) consider(v, copy, out.has_d, out.theta_d, out.argmin_d, out.branch_d);
      if (opt.neumann) consider(v, copy, out.has_n, out.theta_n, out.argmin_n, out.branch_n);
    }
    for (const auto& gp : subsample(gamma.gamma2, opt.max_points)) {
      if (opt.dirichlet) {
        const ThetaEvaluation ev = evaluate(gp, "boundary", BoundaryCondition::dirichlet);
        consider(ev.value, ev, out.has_d, out.theta_d, out.argmin_d, out.branch_d);
      }
      if (opt.neumann) {
        const ThetaEvaluation ev = evaluate(gp, "boundary", BoundaryCondition::neumann);
        consider(ev.value, ev, out.has_n, out.theta_n, out.argmin_n, out.branch_n);
      }
    }
  }
  if (opt.dtn) {
    if (gamma.gamma0.empty()) throw ModelError("theta_coefficients: empty Gamma_0");
    for (const auto& gp : subsample(gamma.gamma0, opt.max_points)) {
      const ThetaEvaluation ev = evaluate(gp, "boundary", BoundaryCondition::dtn);
      consider(ev.value, ev, out.has_dn, out.theta_dn, out.argmin_dn, out.branch_dn);
    }
  }
  return out;
}

void write_model_csv(std::ostream& os, const std::vector<ThetaEvaluation>& evals) {
  os << "y,branch,bc,R,h,lambda,residual,lambda_extrapolated,error_bar\n";
  char buf[512];
  for (const auto& ev : evals) {
    std::string y;
    for (Eigen::Index k = 0; k < ev.y.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%s%.17g", k ? " " : "", ev.y[k]);
      y += buf;
    }
    for (const auto& p : ev.estimate.points) {
      std::snprintf(buf, sizeof buf, "%s,%s,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", y.c_str(), ev.branch.c_str(),
                    to_string(ev.bc).c_str(), p.R, p.h, p.lambda, p.residual, ev.estimate.lambda_inf,
                    ev.estimate.error_bar);
      os << buf;
    }
  }
}

}  // namespace maglap
