#pragma once

#include "maglap/field_core.hpp"
#include "maglap/polynomial.hpp"

#include <Eigen/Core>

#include <functional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace maglap {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Rectangle {
  Point center;
  Eigen::VectorXd sides;
};

/// Ball of the given radius (a disk when d = 2).
struct Disk {
  Point center;
  double radius = 1.0;
};

/// Planar star domain r(phi) = a_0 + sum_k a_k cos(k phi) + b_k sin(k phi).
struct SmoothStar {
  Point center;
  std::vector<double> cos_coeffs;  // a_0, a_1, ...
  std::vector<double> sin_coeffs;  // b_1, b_2, ...

  double radius(double phi) const;
  double radius_derivative(double phi) const;
};

/// {<x, n> < 0} truncated to a box: depth R along -n, lateral half-width R.
struct HalfSpaceBox {
  Eigen::VectorXd normal;
  double half_width = 1.0;
};

class DomainSpec {
 public:
  using Variant = std::variant<Rectangle, Disk, SmoothStar, HalfSpaceBox>;

  DomainSpec(Variant v);  // NOLINT(google-explicit-constructor)

  const Variant& variant() const { return v_; }
  std::size_t dim() const;
  std::string kind() const;
  /// Lattice anchor used by default when gridding this domain.
  Point anchor() const;
  std::pair<Point, Point> bounding_box() const;
  /// Whether the boundary is grid-aligned (rectangles, half-space boxes with axis normals).
  bool grid_aligned() const;

 private:
  Variant v_;
};

DomainSpec make_rectangle(Point center, Eigen::VectorXd sides);
DomainSpec make_disk(Point center, double radius);
DomainSpec make_star(Point center, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);
DomainSpec make_half_space_box(Eigen::VectorXd normal, double half_width);

/// Proper rotation Q with Q n = -e_d; coordinates y = Q x put the half-space at y_d > 0.
Eigen::MatrixXd half_space_frame(const Eigen::VectorXd& normal);

/// Open-domain membership.
bool inside(const DomainSpec& domain, const Point& x);
/// Membership in the closure, with a relative slack for points on the boundary.
bool inside_closed(const DomainSpec& domain, const Point& x, double slack = 1e-10);
/// Distance from an interior point to the boundary (non-positive outside).
double distance_to_boundary(const DomainSpec& domain, const Point& x);

struct BoundarySample {
  std::vector<Point> points;
  std::vector<Eigen::VectorXd> normals;
  std::vector<double> weights;
  /// Curve index and parameter of each point (planar domains); used for refinement.
  std::vector<int> curve;
  std::vector<double> param;

  std::size_t size() const { return points.size(); }
  double total_weight() const;
};

/// One smooth piece of a planar boundary, parametrized on [t0, t1].
struct BoundaryCurve {
  std::function<Point(double)> point;
  std::function<Eigen::VectorXd(double)> normal;
  std::function<double(double)> speed;
  double t0 = 0.0;
  double t1 = 1.0;
  bool periodic = false;
  double length = 0.0;
};

std::vector<BoundaryCurve> boundary_curves(const DomainSpec& domain);

BoundarySample boundary_sample(const DomainSpec& domain, int count);

struct GammaPoint {
  Point x;
  int kappa = 0;
  Eigen::VectorXd normal;  // empty for interior points
};

struct GammaReport {
  int kappa_star = 0;
  int kappa_0 = 0;
  std::vector<GammaPoint> gamma1;  // interior points with kappa = kappa_star
  std::vector<GammaPoint> gamma2;  // boundary points with kappa = kappa_star
  std::vector<GammaPoint> gamma0;  // boundary points with kappa = kappa_0
  std::size_t interior_samples = 0;
  std::size_t boundary_samples = 0;
};

struct GammaOptions {
  double grid_step = 0.05;
  int boundary_count = 256;
  double tol = kDefaultVanishingTol;
  int kappa_max = 8;
  bool refine = true;
};

GammaReport classify_gamma(const PolyMatrixField& b, const DomainSpec& domain, const GammaOptions& opt = {});

}  // namespace maglap
