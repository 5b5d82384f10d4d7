#include "maglap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace maglap {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Point vec2(double a, double b) { return Point(Eigen::Vector2d(a, b)); }

std::string format_point(const Point& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index k = 0; k < x.size(); ++k) os << (k ? ", " : "") << x[k];
  os << ")";
  return os.str();
}

}  // namespace

double SmoothStar::radius(double phi) const {
  double r = cos_coeffs.empty() ? 0.0 : cos_coeffs[0];
  for (std::size_t k = 1; k < cos_coeffs.size(); ++k) r += cos_coeffs[k] * std::cos(static_cast<double>(k) * phi);
  for (std::size_t k = 0; k < sin_coeffs.size(); ++k) r += sin_coeffs[k] * std::sin(static_cast<double>(k + 1) * phi);
  return r;
}

double SmoothStar::radius_derivative(double phi) const {
  double r = 0.0;
  for (std::size_t k = 1; k < cos_coeffs.size(); ++k)
    r -= static_cast<double>(k) * cos_coeffs[k] * std::sin(static_cast<double>(k) * phi);
  for (std::size_t k = 0; k < sin_coeffs.size(); ++k)
    r += static_cast<double>(k + 1) * sin_coeffs[k] * std::cos(static_cast<double>(k + 1) * phi);
  return r;
}

DomainSpec::DomainSpec(Variant v) : v_(std::move(v)) {
  std::visit(overloaded{
                 [](const Rectangle& r) {
                   if (r.center.size() != r.sides.size() || r.center.size() < 2)
                     throw GeometryError("rectangle: center and sides must share dimension >= 2");
                   if ((r.sides.array() <= 0).any()) throw GeometryError("rectangle: side lengths must be positive");
                 },
                 [](const Disk& d) {
                   if (d.center.size() < 2) throw GeometryError("disk: dimension must be >= 2");
                   if (!(d.radius > 0)) throw GeometryError("disk: radius must be positive");
                 },
                 [](const SmoothStar& s) {
                   if (s.center.size() != 2) throw GeometryError("smooth star domains are planar only");
                   if (s.cos_coeffs.empty()) throw GeometryError("smooth star: missing mean radius");
                   double lo = 1e300;
                   for (int i = 0; i < 4096; ++i) lo = std::min(lo, s.radius(kTwoPi * i / 4096.0));
                   if (!(lo > 0)) throw GeometryError("smooth star: radius function must stay positive");
                 },
                 [](const HalfSpaceBox& h) {
                   if (h.normal.size() < 2) throw GeometryError("half-space box: dimension must be >= 2");
                   if (std::abs(h.normal.norm() - 1.0) > 1e-12) throw GeometryError("half-space box: normal must be unit");
                   if (!(h.half_width > 0)) throw GeometryError("half-space box: size must be positive");
                 },
             },
             v_);
}

std::size_t DomainSpec::dim() const {
  return std::visit(overloaded{
                        [](const Rectangle& r) { return static_cast<std::size_t>(r.center.size()); },
                        [](const Disk& d) { return static_cast<std::size_t>(d.center.size()); },
                        [](const SmoothStar&) { return std::size_t{2}; },
                        [](const HalfSpaceBox& h) { return static_cast<std::size_t>(h.normal.size()); },
                    },
                    v_);
}

std::string DomainSpec::kind() const {
  return std::visit(overloaded{
                        [](const Rectangle&) { return std::string("rectangle"); },
                        [](const Disk&) { return std::string("disk"); },
                        [](const SmoothStar&) { return std::string("smooth_star"); },
                        [](const HalfSpaceBox&) { return std::string("half_space_box"); },
                    },
                    v_);
}

Point DomainSpec::anchor() const {
  return std::visit(overloaded{
                        [](const Rectangle& r) { return r.center; },
                        [](const Disk& d) { return d.center; },
                        [](const SmoothStar& s) { return s.center; },
                        [](const HalfSpaceBox& h) { return Point(Point::Zero(h.normal.size())); },
                    },
                    v_);
}

std::pair<Point, Point> DomainSpec::bounding_box() const {
  return std::visit(
      overloaded{
          [](const Rectangle& r) { return std::pair<Point, Point>(r.center - 0.5 * r.sides, r.center + 0.5 * r.sides); },
          [](const Disk& d) {
            const Point e = Point::Constant(d.center.size(), d.radius);
            return std::pair<Point, Point>(d.center - e, d.center + e);
          },
          [](const SmoothStar& s) {
            double rmax = 0.0;
            for (int i = 0; i < 4096; ++i) rmax = std::max(rmax, s.radius(kTwoPi * i / 4096.0));
            const Point e = Point::Constant(2, rmax * 1.001);
            return std::pair<Point, Point>(s.center - e, s.center + e);
          },
          [](const HalfSpaceBox& h) {
            const auto d = h.normal.size();
            const Eigen::MatrixXd q = half_space_frame(h.normal);
            // corners of the frame box mapped back; Q is orthogonal so x = Q^T y
            Point lo = Point::Constant(d, 1e300), hi = Point::Constant(d, -1e300);
            for (long mask = 0; mask < (1L << d); ++mask) {
              Point y(d);
              for (Eigen::Index k = 0; k < d; ++k) {
                const bool up = (mask >> k) & 1;
                y[k] = (k + 1 == d) ? (up ? h.half_width : 0.0) : (up ? h.half_width : -h.half_width);
              }
              const Point x = q.transpose() * y;
              lo = lo.cwiseMin(x);
              hi = hi.cwiseMax(x);
            }
            return std::pair<Point, Point>(lo, hi);
          },
      },
      v_);
}

bool DomainSpec::grid_aligned() const {
  if (std::holds_alternative<Rectangle>(v_)) return true;
  if (const auto* h = std::get_if<HalfSpaceBox>(&v_)) {
    int nonzero = 0;
    for (Eigen::Index k = 0; k < h->normal.size(); ++k)
      if (h->normal[k] != 0.0) ++nonzero;
    return nonzero == 1;
  }
  return false;
}

DomainSpec make_rectangle(Point center, Eigen::VectorXd sides) { return DomainSpec(Rectangle{std::move(center), std::move(sides)}); }
DomainSpec make_disk(Point center, double radius) { return DomainSpec(Disk{std::move(center), radius}); }
DomainSpec make_star(Point center, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs) {
  return DomainSpec(SmoothStar{std::move(center), std::move(cos_coeffs), std::move(sin_coeffs)});
}
DomainSpec make_half_space_box(Eigen::VectorXd normal, double half_width) {
  return DomainSpec(HalfSpaceBox{std::move(normal), half_width});
}

Eigen::MatrixXd half_space_frame(const Eigen::VectorXd& normal) {
  const auto d = normal.size();
  Eigen::VectorXd target = Eigen::VectorXd::Zero(d);
  target[d - 1] = -1.0;
  if ((normal - target).norm() < 1e-15) return Eigen::MatrixXd::Identity(d, d);
  if ((normal + target).norm() < 1e-15) {
    // n = +e_d: rotate by pi in the (x_1, x_d) plane.
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(d, d);
    q(0, 0) = -1.0;
    q(d - 1, d - 1) = -1.0;
    return q;
  }
  // Householder reflection n -> -e_d, then flip x_1 to restore orientation.
  const Eigen::VectorXd v = normal - target;
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(d, d) - 2.0 * v * v.transpose() / v.squaredNorm();
  h.row(0) *= -1.0;
  return h;
}

bool inside(const DomainSpec& domain, const Point& x) {
  return std::visit(overloaded{
                        [&](const Rectangle& r) { return ((x - r.center).cwiseAbs().array() < 0.5 * r.sides.array()).all(); },
                        [&](const Disk& d) { return (x - d.center).norm() < d.radius; },
                        [&](const SmoothStar& s) {
                          const Point rel = x - s.center;
                          return rel.norm() < s.radius(std::atan2(rel[1], rel[0]));
                        },
                        [&](const HalfSpaceBox& h) {
                          const Point y = half_space_frame(h.normal) * x;
                          const auto d = y.size();
                          if (!(y[d - 1] > 0.0 && y[d - 1] < h.half_width)) return false;
                          for (Eigen::Index k = 0; k + 1 < d; ++k)
                            if (!(std::abs(y[k]) < h.half_width)) return false;
                          return true;
                        },
                    },
                    domain.variant());
}

bool inside_closed(const DomainSpec& domain, const Point& x, double slack) {
  return std::visit(overloaded{
                        [&](const Rectangle& r) {
                          const Eigen::ArrayXd lim = 0.5 * r.sides.array() * (1.0 + slack);
                          return ((x - r.center).cwiseAbs().array() <= lim).all();
                        },
                        [&](const Disk& d) { return (x - d.center).norm() <= d.radius * (1.0 + slack); },
                        [&](const SmoothStar& s) {
                          const Point rel = x - s.center;
                          return rel.norm() <= s.radius(std::atan2(rel[1], rel[0])) * (1.0 + slack);
                        },
                        [&](const HalfSpaceBox& h) {
                          const Point y = half_space_frame(h.normal) * x;
                          const auto d = y.size();
                          const double s = slack * h.half_width;
                          if (!(y[d - 1] >= -s && y[d - 1] <= h.half_width + s)) return false;
                          for (Eigen::Index k = 0; k + 1 < d; ++k)
                            if (!(std::abs(y[k]) <= h.half_width + s)) return false;
                          return true;
                        },
                    },
                    domain.variant());
}

double distance_to_boundary(const DomainSpec& domain, const Point& x) {
  return std::visit(overloaded{
                        [&](const Rectangle& r) {
                          return (0.5 * r.sides - (x - r.center).cwiseAbs()).minCoeff();
                        },
                        [&](const Disk& d) { return d.radius - (x - d.center).norm(); },
                        [&](const SmoothStar&) {
                          const auto bs = boundary_sample(domain, 8192);
                          double best = 1e300;
                          for (const auto& p : bs.points) best = std::min(best, (p - x).norm());
                          return inside(domain, x) ? best : -best;
                        },
                        [&](const HalfSpaceBox& h) {
                          const Point y = half_space_frame(h.normal) * x;
                          const auto d = y.size();
                          double m = std::min(y[d - 1], h.half_width - y[d - 1]);
                          for (Eigen::Index k = 0; k + 1 < d; ++k) m = std::min(m, h.half_width - std::abs(y[k]));
                          return m;
                        },
                    },
                    domain.variant());
}

double BoundarySample::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

std::vector<BoundaryCurve> boundary_curves(const DomainSpec& domain) {
  if (domain.dim() != 2) throw GeometryError("boundary curves are defined for planar domains only");
  std::vector<BoundaryCurve> curves;
  std::visit(
      overloaded{
          [&](const Rectangle& r) {
            const Point lo = r.center - 0.5 * r.sides, hi = r.center + 0.5 * r.sides;
            struct Edge {
              Point a, b, n;
            };
            const Edge edges[4] = {{vec2(lo[0], lo[1]), vec2(hi[0], lo[1]), vec2(0, -1)},
                                   {vec2(hi[0], lo[1]), vec2(hi[0], hi[1]), vec2(1, 0)},
                                   {vec2(hi[0], hi[1]), vec2(lo[0], hi[1]), vec2(0, 1)},
                                   {vec2(lo[0], hi[1]), vec2(lo[0], lo[1]), vec2(-1, 0)}};
            for (const auto& e : edges) {
              const double len = (e.b - e.a).norm();
              curves.push_back({[a = e.a, b = e.b](double t) { return Point(a + t * (b - a)); },
                                [n = e.n](double) { return Eigen::VectorXd(n); },
                                [len](double) { return len; }, 0.0, 1.0, false, len});
            }
          },
          [&](const Disk& d) {
            curves.push_back({[c = d.center, r = d.radius](double t) { return Point(c + r * vec2(std::cos(t), std::sin(t))); },
                              [](double t) { return Eigen::VectorXd(vec2(std::cos(t), std::sin(t))); },
                              [r = d.radius](double) { return r; }, 0.0, kTwoPi, true, kTwoPi * d.radius});
          },
          [&](const SmoothStar& s) {
            auto tangent = [s](double t) {
              const double r = s.radius(t), dr = s.radius_derivative(t);
              return Eigen::Vector2d(dr * std::cos(t) - r * std::sin(t), dr * std::sin(t) + r * std::cos(t));
            };
            double len = 0.0;
            for (int i = 0; i < 8192; ++i) len += tangent(kTwoPi * (i + 0.5) / 8192).norm() * kTwoPi / 8192;
            curves.push_back({[s](double t) { return Point(s.center + s.radius(t) * vec2(std::cos(t), std::sin(t))); },
                              [tangent](double t) {
                                const Eigen::Vector2d tg = tangent(t);
                                return Eigen::VectorXd(vec2(tg[1], -tg[0]) / tg.norm());
                              },
                              [tangent](double t) { return tangent(t).norm(); }, 0.0, kTwoPi, true, len});
          },
          [&](const HalfSpaceBox& h) {
            const Eigen::MatrixXd qt = half_space_frame(h.normal).transpose();
            const double len = 2.0 * h.half_width;
            curves.push_back({[qt, w = h.half_width](double t) { return Point(qt * vec2(-w + 2.0 * w * t, 0.0)); },
                              [n = h.normal](double) { return Eigen::VectorXd(n); }, [len](double) { return len; },
                              0.0, 1.0, false, len});
          },
      },
      domain.variant());
  return curves;
}

namespace {

BoundarySample planar_sample(const DomainSpec& domain, int count) {
  const auto curves = boundary_curves(domain);
  double total = 0.0;
  for (const auto& c : curves) total += c.length;
  BoundarySample bs;
  int assigned = 0;
  for (std::size_t ci = 0; ci < curves.size(); ++ci) {
    const auto& c = curves[ci];
    int n = (ci + 1 == curves.size()) ? count - assigned
                                      : std::max(1, static_cast<int>(std::lround(count * c.length / total)));
    n = std::max(n, 1);
    assigned += n;
    const double dt = (c.t1 - c.t0) / n;
    for (int i = 0; i < n; ++i) {
      const double t = c.periodic ? c.t0 + i * dt : c.t0 + (i + 0.5) * dt;
      bs.points.push_back(c.point(t));
      bs.normals.push_back(c.normal(t));
      bs.weights.push_back(c.speed(t) * dt);
      bs.curve.push_back(static_cast<int>(ci));
      bs.param.push_back(t);
    }
  }
  return bs;
}

// Midpoint grid on a (d-1)-face given by a frame: x = origin + sum_k u_k e_k.
void face_grid(BoundarySample& bs, const Point& origin, const std::vector<Point>& edges, const Eigen::VectorXd& normal,
               int per_axis) {
  const std::size_t m = edges.size();
  double area = 1.0;
  for (const auto& e : edges) area *= e.norm();
  const int n = std::max(per_axis, 1);
  const long total = static_cast<long>(std::pow(n, static_cast<double>(m)));
  for (long idx = 0; idx < total; ++idx) {
    Point p = origin;
    long rem = idx;
    for (std::size_t k = 0; k < m; ++k) {
      const int i = static_cast<int>(rem % n);
      rem /= n;
      p += (i + 0.5) / n * edges[k];
    }
    bs.points.push_back(p);
    bs.normals.push_back(normal);
    bs.weights.push_back(area / static_cast<double>(total));
    bs.curve.push_back(-1);
    bs.param.push_back(0.0);
  }
}

BoundarySample spatial_sample(const DomainSpec& domain, int count) {
  BoundarySample bs;
  std::visit(overloaded{
                 [&](const Rectangle& r) {
                   const auto d = r.center.size();
                   const Point lo = r.center - 0.5 * r.sides;
                   const int per_face = std::max(1, count / static_cast<int>(2 * d));
                   const int per_axis =
                       std::max(1, static_cast<int>(std::lround(std::pow(per_face, 1.0 / static_cast<double>(d - 1)))));
                   for (Eigen::Index k = 0; k < d; ++k)
                     for (int side = 0; side < 2; ++side) {
                       Point origin = lo;
                       origin[k] += side * r.sides[k];
                       std::vector<Point> edges;
                       for (Eigen::Index j = 0; j < d; ++j)
                         if (j != k) {
                           Point e = Point::Zero(d);
                           e[j] = r.sides[j];
                           edges.push_back(e);
                         }
                       Eigen::VectorXd n = Eigen::VectorXd::Zero(d);
                       n[k] = side ? 1.0 : -1.0;
                       face_grid(bs, origin, edges, n, per_axis);
                     }
                 },
                 [&](const Disk& disk) {
                   if (disk.center.size() != 3) throw GeometryError("ball boundary sampling supports d <= 3");
                   const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
                   const double r = disk.radius;
                   for (int k = 0; k < count; ++k) {
                     const double z = 1.0 - 2.0 * (k + 0.5) / count;
                     const double rad = std::sqrt(1.0 - z * z);
                     Eigen::VectorXd n(3);
                     n << rad * std::cos(golden * k), rad * std::sin(golden * k), z;
                     bs.points.push_back(disk.center + r * n);
                     bs.normals.push_back(n);
                     bs.weights.push_back(4.0 * std::numbers::pi * r * r / count);
                     bs.curve.push_back(-1);
                     bs.param.push_back(0.0);
                   }
                 },
                 [&](const SmoothStar&) { throw GeometryError("smooth star domains are planar only"); },
                 [&](const HalfSpaceBox& h) {
                   const auto d = h.normal.size();
                   const Eigen::MatrixXd qt = half_space_frame(h.normal).transpose();
                   Point origin = Point::Zero(d);
                   std::vector<Point> edges;
                   for (Eigen::Index j = 0; j + 1 < d; ++j) {
                     Point e = Point::Zero(d);
                     e[j] = 2.0 * h.half_width;
                     origin[j] = -h.half_width;
                     edges.push_back(qt * e);
                   }
                   const int per_axis =
                       std::max(1, static_cast<int>(std::lround(std::pow(count, 1.0 / static_cast<double>(d - 1)))));
                   face_grid(bs, qt * origin, edges, h.normal, per_axis);
                 },
             },
             domain.variant());
  return bs;
}

}  // namespace

BoundarySample boundary_sample(const DomainSpec& domain, int count) {
  if (count < 4) throw GeometryError("boundary_sample: count must be at least 4");
  return domain.dim() == 2 ? planar_sample(domain, count) : spatial_sample(domain, count);
}

// ---------------------------------------------------------------------------

namespace {

struct Classified {
  Point x;
  int kappa;
  Eigen::VectorXd normal;
};

int checked_kappa(const PolyMatrixField& b, const Point& x, const GammaOptions& opt) {
  const auto vo = vanishing_order(b, x, opt.tol, opt.kappa_max);
  if (vo.status == VanishingOrder::Status::zero_field)
    throw GeometryError("classify_gamma: field is identically zero");
  if (vo.status == VanishingOrder::Status::exceeds_cap)
    throw GeometryError("classify_gamma: vanishing order exceeds cap " + std::to_string(opt.kappa_max) + " at " +
                        format_point(x));
  return vo.kappa;
}

// Scalar derivative components d^alpha B_jl with |alpha| < kappa_max, used to locate
// points where B vanishes to higher order between two samples.
std::vector<Polynomial> refinement_functions(const PolyMatrixField& b, int max_order) {
  std::vector<Polynomial> fs;
  const std::size_t d = b.dim();
  for (int k = 0; k <= max_order; ++k)
    for (const auto& alpha : multi_indices_of_order(d, k))
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t l = j + 1; l < d; ++l) {
          Polynomial f = b(j, l).derivative(alpha);
          if (!f.is_zero() && f.degree() > 0) fs.push_back(std::move(f));
        }
  return fs;
}

template <class Path>
std::vector<double> sign_change_roots(const std::vector<Polynomial>& fs, Path path, double t0, double t1) {
  std::vector<double> roots;
  for (const auto& f : fs) {
    double fa = f(path(t0)), fb = f(path(t1));
    if (fa == 0.0 || fb == 0.0 || (fa > 0) == (fb > 0)) continue;
    double a = t0, bnd = t1;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (a + bnd);
      const double fm = f(path(mid));
      if (fm == 0.0) {
        a = bnd = mid;
        break;
      }
      if ((fm > 0) == (fa > 0)) {
        a = mid;
        fa = fm;
      } else {
        bnd = mid;
      }
    }
    roots.push_back(0.5 * (a + bnd));
  }
  return roots;
}

void add_unique(std::vector<Classified>& pts, Classified c, double eps) {
  for (const auto& p : pts)
    if ((p.x - c.x).norm() < eps) return;
  pts.push_back(std::move(c));
}

}  // namespace

GammaReport classify_gamma(const PolyMatrixField& b, const DomainSpec& domain, const GammaOptions& opt) {
  if (b.dim() != domain.dim()) throw GeometryError("classify_gamma: field and domain dimensions differ");
  const auto d = static_cast<Eigen::Index>(domain.dim());
  const auto [lo, hi] = domain.bounding_box();
  const Point anchor = domain.anchor();
  const double step = opt.grid_step;

  // Interior lattice anchored at the domain's anchor point.
  std::vector<Classified> interior;
  Eigen::VectorXi kmin(d), kmax(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    kmin[k] = static_cast<int>(std::floor((lo[k] - anchor[k]) / step)) - 1;
    kmax[k] = static_cast<int>(std::ceil((hi[k] - anchor[k]) / step)) + 1;
  }
  const auto fs = opt.refine ? refinement_functions(b, std::max(0, opt.kappa_max - 1)) : std::vector<Polynomial>{};
  auto lattice_point = [&](const Eigen::VectorXi& idx) {
    Point x = anchor;
    for (Eigen::Index k = 0; k < d; ++k) x[k] += step * idx[k];
    return x;
  };
  Eigen::VectorXi idx = kmin;
  std::vector<Classified> refined;
  for (;;) {
    const Point x = lattice_point(idx);
    if (inside(domain, x)) {
      interior.push_back({x, checked_kappa(b, x, opt), Eigen::VectorXd()});
      if (opt.refine) {
        for (Eigen::Index k = 0; k < d; ++k) {
          Point y = x;
          y[k] += step;
          if (!inside(domain, y)) continue;
          auto path = [&x, k, step](double t) {
            Point p = x;
            p[k] += t * step;
            return p;
          };
          for (double t : sign_change_roots(fs, path, 0.0, 1.0)) {
            const Point r = path(t);
            if (inside(domain, r)) refined.push_back({r, checked_kappa(b, r, opt), Eigen::VectorXd()});
          }
        }
      }
    }
    Eigen::Index k = 0;
    for (; k < d; ++k) {
      if (++idx[k] <= kmax[k]) break;
      idx[k] = kmin[k];
    }
    if (k == d) break;
  }

  const BoundarySample bs = boundary_sample(domain, opt.boundary_count);
  std::vector<Classified> boundary;
  for (std::size_t i = 0; i < bs.size(); ++i) boundary.push_back({bs.points[i], checked_kappa(b, bs.points[i], opt), bs.normals[i]});

  if (opt.refine && d == 2) {
    const auto curves = boundary_curves(domain);
    for (std::size_t i = 0; i < bs.size(); ++i) {
      const int ci = bs.curve[i];
      const auto& c = curves[static_cast<std::size_t>(ci)];
      std::size_t j = i + 1;
      double t_next;
      if (j < bs.size() && bs.curve[j] == ci) {
        t_next = bs.param[j];
      } else if (c.periodic) {
        t_next = c.t1;
      } else {
        continue;
      }
      for (double t : sign_change_roots(fs, c.point, bs.param[i], t_next)) {
        const Point on = c.point(t);
        boundary.push_back({on, checked_kappa(b, on, opt), c.normal(t)});
      }
    }
  }

  const double eps = 1e-9 * std::max(1.0, (hi - lo).norm());
  for (auto& r : refined) add_unique(interior, std::move(r), eps);

  GammaReport rep;
  rep.interior_samples = interior.size();
  rep.boundary_samples = boundary.size();
  int kint = 0, kbnd = 0;
  for (const auto& p : interior) kint = std::max(kint, p.kappa);
  for (const auto& p : boundary) kbnd = std::max(kbnd, p.kappa);
  rep.kappa_star = std::max(kint, kbnd);
  rep.kappa_0 = kbnd;
  for (const auto& p : interior)
    if (p.kappa == rep.kappa_star) rep.gamma1.push_back({p.x, p.kappa, p.normal});
  std::vector<Classified> bnd_unique;
  for (auto& p : boundary) add_unique(bnd_unique, p, eps);
  for (const auto& p : bnd_unique) {
    if (p.kappa == rep.kappa_star) rep.gamma2.push_back({p.x, p.kappa, p.normal});
    if (p.kappa == rep.kappa_0) rep.gamma0.push_back({p.x, p.kappa, p.normal});
  }
  return rep;
}

}  // namespace maglap
