#include "maglap/field_core.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace maglap {

std::string VanishingOrder::describe() const {
  switch (status) {
    case Status::finite: return "kappa=" + std::to_string(kappa);
    case Status::exceeds_cap: return "exceeds kappa_max";
    case Status::zero_field: return "field identically zero";
  }
  return "?";
}

VanishingOrder vanishing_order(const PolyMatrixField& b, const Point& x, double tol, int kappa_max) {
  if (b.is_zero()) return {VanishingOrder::Status::zero_field, 0};
  if (kappa_max < 0) kappa_max = b.degree();
  const auto d = b.dim();
  std::vector<double> order_norm(static_cast<std::size_t>(kappa_max) + 1, 0.0);
  for (int k = 0; k <= kappa_max; ++k)
    for (const auto& alpha : multi_indices_of_order(d, k))
      order_norm[static_cast<std::size_t>(k)] =
          std::max(order_norm[static_cast<std::size_t>(k)], b.derivative_at(alpha, x).norm());
  const double scale = *std::max_element(order_norm.begin(), order_norm.end()) +
                       std::numeric_limits<double>::min();
  for (int k = 0; k <= kappa_max; ++k)
    if (order_norm[static_cast<std::size_t>(k)] > tol * scale) return {VanishingOrder::Status::finite, k};
  return {VanishingOrder::Status::exceeds_cap, kappa_max};
}

double m_tilde(const PolyMatrixField& b, const Point& x) {
  double s = 0.0;
  for (int k = 0; k <= b.degree(); ++k)
    for (const auto& alpha : multi_indices_of_order(b.dim(), k))
      s += std::pow(b.derivative_at(alpha, x).norm(), 1.0 / (k + 2));
  return s;
}

double cube_max_norm(const FieldNormEvaluator& ev, const Point& x, double r, int samples_per_axis) {
  const std::size_t d = ev.dim();
  const int n = std::max(samples_per_axis, 2);
  const double half = 0.5 * r;
  const double step = r / (n - 1);
  std::vector<int> idx(d, 0);
  std::vector<double> p(d), best(d);
  double best_val = -1.0;
  for (;;) {
    for (std::size_t k = 0; k < d; ++k) p[k] = x[static_cast<Eigen::Index>(k)] - half + step * idx[k];
    const double v = ev.norm(p);
    if (v > best_val) {
      best_val = v;
      best = p;
    }
    std::size_t k = 0;
    while (k < d && ++idx[k] == n) idx[k++] = 0;
    if (k == d) break;
  }
  // Pattern-search polish inside the cube, starting from the best sample.
  double h = step * 0.5;
  const double h_min = r * 1e-7;
  while (h > h_min) {
    bool moved = false;
    for (std::size_t k = 0; k < d; ++k) {
      for (double sgn : {-1.0, 1.0}) {
        p = best;
        const double lo = x[static_cast<Eigen::Index>(k)] - half;
        const double hi = x[static_cast<Eigen::Index>(k)] + half;
        p[k] = std::clamp(best[k] + sgn * h, lo, hi);
        const double v = ev.norm(p);
        if (v > best_val) {
          best_val = v;
          best = p;
          moved = true;
        }
      }
    }
    if (!moved) h *= 0.5;
  }
  return best_val;
}

double m_exact(const FieldNormEvaluator& ev, const Point& x, double initial_guess, const MExactOptions& opt) {
  auto g = [&](double r) { return r * r * cube_max_norm(ev, x, r, opt.samples_per_axis); };
  double lo = initial_guess > 0 ? 1.0 / initial_guess : 1.0;
  double hi = lo;
  int guard = 0;
  while (g(lo) > 1.0) {
    lo *= 0.5;
    if (++guard > 200) throw FieldError("m undefined: bracket search failed");
  }
  while (g(hi) <= 1.0) {
    hi *= 2.0;
    if (++guard > 400) throw FieldError("m undefined: field vanishes on every sampled cube");
  }
  if (hi == lo) hi = 2.0 * lo;
  while (hi / lo - 1.0 > opt.rel_tol) {
    const double mid = std::sqrt(lo * hi);
    if (g(mid) <= 1.0) lo = mid;
    else hi = mid;
  }
  return 2.0 / (lo + hi);
}

double m_exact(const PolyMatrixField& b, const Point& x, const MExactOptions& opt) {
  if (b.is_zero()) throw FieldError("m undefined for an identically zero field");
  FieldNormEvaluator ev(b);
  return m_exact(ev, x, m_tilde(b, x), opt);
}

Eigen::MatrixXd transverse_gradients(const PolyMatrixField& b, const Point& y, int kappa) {
  const std::size_t d = b.dim();
  const auto alphas = multi_indices_of_order(d, kappa - 1);
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(alphas.size() * d * (d - 1) / 2), static_cast<Eigen::Index>(d));
  Eigen::Index r = 0;
  for (const auto& alpha : alphas)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t l = j + 1; l < d; ++l) {
        const Polynomial dp = b(j, l).derivative(alpha);
        for (std::size_t i = 0; i < d; ++i) rows(r, static_cast<Eigen::Index>(i)) = dp.derivative(i)(y);
        ++r;
      }
  return rows;
}

namespace {

constexpr double kRankTol = 1e-10;

// Null space (columns) and its orthogonal complement of the row space of g.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> null_and_range(const Eigen::MatrixXd& g, Eigen::Index d) {
  if (g.rows() == 0) return {Eigen::MatrixXd::Identity(d, d), Eigen::MatrixXd(d, 0)};
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > kRankTol * smax && s[i] > 0.0) ++rank;
  const Eigen::MatrixXd& v = svd.matrixV();
  return {v.rightCols(d - rank), v.leftCols(rank)};
}

double sigma_objective(const Eigen::MatrixXd& g, const Eigen::VectorXd& z) { return (g * z).cwiseAbs().sum(); }

}  // namespace

Eigen::MatrixXd invariant_subspace(const PolyMatrixField& p) {
  const auto d = static_cast<Eigen::Index>(p.dim());
  const int kappa = p.degree();
  if (kappa <= 0) return Eigen::MatrixXd::Identity(d, d);
  const Point origin = Point::Zero(d);
  return null_and_range(transverse_gradients(p, origin, kappa), d).first;
}

double sigma(const PolyMatrixField& b, const Point& y) {
  const auto vo = vanishing_order(b, y);
  if (!vo.finite()) throw FieldError("sigma undefined: " + vo.describe());
  if (vo.kappa == 0) throw FieldError("sigma undefined for non-vanishing field");
  const Eigen::MatrixXd g = transverse_gradients(b, y, vo.kappa);
  const auto d = static_cast<Eigen::Index>(b.dim());
  const Eigen::MatrixXd perp = null_and_range(g, d).second;  // basis of V^perp
  const Eigen::MatrixXd gp = g * perp;                        // objective in V^perp coordinates
  const Eigen::Index m = perp.cols();
  if (m == 0) return 0.0;
  if (m == 1) return sigma_objective(gp, Eigen::VectorXd::Ones(1));

  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_z;
  auto consider = [&](Eigen::VectorXd z) {
    const double n = z.norm();
    if (n < 1e-14) return;
    z /= n;
    const double v = sigma_objective(gp, z);
    if (v < best) {
      best = v;
      best_z = z;
    }
  };
  // Along any great circle the objective is concave between the zeros of its terms,
  // so the minimum sits on a kink: z orthogonal to m-1 of the rows.
  if (m == 2) {
    for (Eigen::Index i = 0; i < gp.rows(); ++i) consider(Eigen::Vector2d(-gp(i, 1), gp(i, 0)));
    for (int k = 0; k < 2048; ++k) {
      const double phi = std::numbers::pi * k / 2048.0;
      consider(Eigen::Vector2d(std::cos(phi), std::sin(phi)));
    }
  } else {
    if (m == 3)
      for (Eigen::Index i = 0; i < gp.rows(); ++i)
        for (Eigen::Index j = i + 1; j < gp.rows(); ++j)
          consider(Eigen::Vector3d(gp.row(i).transpose()).cross(Eigen::Vector3d(gp.row(j).transpose())));
    // Fibonacci sphere in the first three coordinates of V^perp (m <= 3 for d <= 3).
    const int n = 4096;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < n; ++k) {
      const double zc = 1.0 - 2.0 * (k + 0.5) / n;
      const double rad = std::sqrt(1.0 - zc * zc);
      Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
      z[0] = rad * std::cos(golden * k);
      z[1] = rad * std::sin(golden * k);
      z[2] = zc;
      consider(z);
    }
  }
  // Local projected descent (derivative-free) from the incumbent.
  double step = 0.05;
  while (step > 1e-12) {
    bool moved = false;
    for (Eigen::Index k = 0; k < m; ++k)
      for (double sgn : {-1.0, 1.0}) {
        Eigen::VectorXd z = best_z;
        z[k] += sgn * step;
        const double before = best;
        consider(z);
        if (best < before) moved = true;
      }
    if (!moved) step *= 0.5;
  }
  return best;
}

double tau(const Eigen::MatrixXd& v_basis, const Eigen::VectorXd& n) {
  if (v_basis.cols() == 0) return 0.0;
  return (v_basis.transpose() * n).norm();
}

PolyVectorField radial_gauge_potential(const PolyMatrixField& p) {
  const std::size_t d = p.dim();
  std::vector<Polynomial> comps(d, Polynomial(d));
  // A_j(x) = sum_l x_l int_0^1 P_lj(tx) t dt; a monomial of degree |alpha| picks up 1/(|alpha|+2).
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t l = 0; l < d; ++l) {
      if (l == j) continue;
      for (const auto& [alpha, c] : p(l, j).terms()) {
        MultiIndex beta = alpha;
        beta[l] += 1;
        comps[j].add_term(beta, c / (alpha.order() + 2));
      }
    }
  return PolyVectorField(std::move(comps));
}

ModelData taylor_model(const PolyMatrixField& b, const Point& y, double tol) {
  const auto vo = vanishing_order(b, y, tol);
  if (!vo.finite()) throw FieldError("taylor model undefined: " + vo.describe());
  ModelData md;
  md.y = y;
  md.kappa = vo.kappa;
  md.p = b.translated(y).homogeneous_part(vo.kappa);
  md.a_model = radial_gauge_potential(md.p);
  md.v_basis = invariant_subspace(md.p);
  if (vo.kappa >= 1) md.sigma = sigma(b, y);
  return md;
}

double coefficient_mass(const PolyMatrixField& p, int kappa) {
  const std::size_t d = p.dim();
  double total = 0.0;
  for (const auto& alpha : multi_indices_of_order(d, kappa)) {
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t l = j + 1; l < d; ++l) {
        const double c = p(j, l).coefficient(alpha);
        sq += c * c;
      }
    total += std::sqrt(sq);
  }
  return total;
}

ModelData normalize_model(const ModelData& md) {
  const double mass = coefficient_mass(md.p, md.kappa);
  if (mass == 0.0) throw FieldError("cannot normalize a zero model field");
  const double factor = 1.0 / mass;
  ModelData out = md;
  out.p = md.p * factor;
  out.a_model = factor * md.a_model;
  out.normalization = md.normalization * factor;
  if (out.kappa >= 1) out.sigma = md.sigma * factor;
  return out;
}

double unnormalize_energy(double lambda_normalized, double normalization, int kappa) {
  // lambda(c A) = c^{2/(kappa+2)} lambda(A) on R^d, with c = 1/normalization.
  return std::pow(1.0 / normalization, 2.0 / (kappa + 2)) * lambda_normalized;
}

}  // namespace maglap
