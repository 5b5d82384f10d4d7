#include "maglap/geometry.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <random>

using namespace maglap;
using maglap::testing::c;
using maglap::testing::x;

namespace {

Point pt(double a, double b) { return Point(Eigen::Vector2d(a, b)); }

}  // namespace

TEST_CASE("inside for the basic domains") {
  CHECK(inside(make_disk(pt(0, 0), 1.0), pt(0.5, 0)));
  CHECK_FALSE(inside(make_rectangle(pt(0, 0), pt(2, 2)), pt(1.0001, 0)));
  CHECK_FALSE(inside(make_rectangle(pt(0, 0), pt(2, 2)), pt(1.0, 0)));
  CHECK(inside(make_half_space_box(pt(0, -1), 4.0), pt(0, 0.5)));
  CHECK_FALSE(inside(make_half_space_box(pt(0, -1), 4.0), pt(0, -0.5)));
  CHECK_FALSE(inside(make_half_space_box(pt(0, -1), 4.0), pt(0, 4.5)));
}

TEST_CASE("inside agrees with analytic formulas") {
  std::mt19937_64 rng(7);
  const auto disk = make_disk(pt(0.3, -0.2), 1.3);
  const auto rect = make_rectangle(pt(0.1, 0.4), pt(2.0, 1.0));
  for (int i = 0; i < 2000; ++i) {
    const Point p = maglap::testing::random_point(rng, 2, 2.0);
    const double dx = p[0] - 0.3, dy = p[1] + 0.2;
    CHECK(inside(disk, p) == (dx * dx + dy * dy < 1.3 * 1.3));
    CHECK(inside(rect, p) == (std::abs(p[0] - 0.1) < 1.0 && std::abs(p[1] - 0.4) < 0.5));
  }
}

TEST_CASE("invalid domains are rejected") {
  CHECK_THROWS_AS(make_disk(pt(0, 0), -1.0), GeometryError);
  CHECK_THROWS_AS(make_rectangle(pt(0, 0), pt(1, 0)), GeometryError);
  CHECK_THROWS_AS(make_half_space_box(pt(0, 2), 1.0), GeometryError);
  CHECK_THROWS_AS(make_star(pt(0, 0), {0.5, 0.6}, {}), GeometryError);
}

TEST_CASE("half-space frame is a rotation sending n to -e_d") {
  std::mt19937_64 rng(3);
  for (std::size_t d : {2u, 3u})
    for (int i = 0; i < 20; ++i) {
      Eigen::VectorXd n = maglap::testing::random_point(rng, d);
      n.normalize();
      const Eigen::MatrixXd q = half_space_frame(n);
      CHECK((q * q.transpose() - Eigen::MatrixXd::Identity(d, d)).norm() < 1e-12);
      CHECK(q.determinant() == doctest::Approx(1.0).epsilon(1e-12));
      Eigen::VectorXd target = Eigen::VectorXd::Zero(d);
      target[d - 1] = -1;
      CHECK((q * n - target).norm() < 1e-12);
    }
  for (const Eigen::VectorXd& n : {Eigen::VectorXd(pt(0, 1)), Eigen::VectorXd(pt(0, -1))}) {
    const Eigen::MatrixXd q = half_space_frame(n);
    CHECK(q.determinant() == doctest::Approx(1.0));
    CHECK((q * n - pt(0, -1)).norm() < 1e-15);
  }
}

TEST_CASE("boundary samples") {
  SUBCASE("unit disk normals equal points") {
    const auto bs = boundary_sample(make_disk(pt(0, 0), 1.0), 4);
    REQUIRE(bs.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK((bs.normals[i] - bs.points[i]).norm() < 1e-15);
  }
  SUBCASE("rectangle normals are axis vectors and corners are excluded") {
    const auto bs = boundary_sample(make_rectangle(pt(0, 0), pt(2, 2)), 64);
    for (std::size_t i = 0; i < bs.size(); ++i) {
      const auto& n = bs.normals[i];
      CHECK(n.cwiseAbs().maxCoeff() == 1.0);
      CHECK(n.cwiseAbs().sum() == 1.0);
      CHECK(bs.points[i].cwiseAbs().minCoeff() < 1.0);
    }
    CHECK(bs.total_weight() == doctest::Approx(8.0).epsilon(1e-14));
  }
  SUBCASE("disk weights sum to the perimeter") {
    const auto bs = boundary_sample(make_disk(pt(0, 0), 1.0), 256);
    CHECK(std::abs(bs.total_weight() - 2 * std::numbers::pi) < 1e-6);
  }
  SUBCASE("star perimeter against a fine trapezoid oracle") {
    const auto star = make_star(pt(0, 0), {1.0, 0.0, 0.0, 0.15}, {0.0, 0.05});
    const auto& s = std::get<SmoothStar>(star.variant());
    double oracle = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double t = 2 * std::numbers::pi * i / n;
      oracle += std::hypot(s.radius(t), s.radius_derivative(t)) * 2 * std::numbers::pi / n;
    }
    const auto bs = boundary_sample(star, 512);
    CHECK(bs.total_weight() == doctest::Approx(oracle).epsilon(1e-9));
  }
  SUBCASE("normals are unit and outward for convex domains") {
    for (const auto& dom : {make_disk(pt(0.5, 0.5), 2.0), make_rectangle(pt(1, -1), pt(3, 1)),
                            make_star(pt(0, 0), {1.0, 0.05}, {0.05})}) {
      const auto bs = boundary_sample(dom, 200);
      for (std::size_t i = 0; i < bs.size(); ++i) {
        CHECK(std::abs(bs.normals[i].norm() - 1.0) < 1e-12);
        CHECK(bs.normals[i].dot(bs.points[i] - dom.anchor()) > 0);
        CHECK(bs.weights[i] > 0);
      }
    }
  }
  SUBCASE("half-space box samples only the true face") {
    const Eigen::VectorXd n = pt(1, 1).normalized();
    const auto bs = boundary_sample(make_half_space_box(n, 2.0), 40);
    for (std::size_t i = 0; i < bs.size(); ++i) {
      CHECK(std::abs(bs.points[i].dot(n)) < 1e-14);
      CHECK((bs.normals[i] - n).norm() < 1e-15);
    }
    CHECK(bs.total_weight() == doctest::Approx(4.0));
  }
  SUBCASE("3D boxes and balls") {
    const auto cube = boundary_sample(make_rectangle(Point::Zero(3), Point::Constant(3, 2.0)), 600);
    CHECK(cube.total_weight() == doctest::Approx(24.0));
    const auto ball = boundary_sample(make_disk(Point::Zero(3), 1.0), 500);
    CHECK(ball.total_weight() == doctest::Approx(4 * std::numbers::pi));
    for (std::size_t i = 0; i < ball.size(); ++i) CHECK((ball.normals[i] - ball.points[i]).norm() < 1e-14);
  }
  CHECK_THROWS_AS(boundary_sample(make_disk(pt(0, 0), 1.0), 2), GeometryError);
}

TEST_CASE("classify_gamma examples") {
  SUBCASE("linear field on the unit disk") {
    const auto rep = classify_gamma(PolyMatrixField::planar(x(2, 0)), make_disk(pt(0, 0), 1.0));
    CHECK(rep.kappa_star == 1);
    CHECK(rep.kappa_0 == 1);
    REQUIRE(rep.gamma2.size() == 2);
    const bool order = rep.gamma2[0].x[1] > 0;
    CHECK((rep.gamma2[order ? 0 : 1].x - pt(0, 1)).norm() < 1e-9);
    CHECK((rep.gamma2[order ? 1 : 0].x - pt(0, -1)).norm() < 1e-9);
    CHECK(!rep.gamma1.empty());
    for (const auto& g : rep.gamma1) {
      CHECK(std::abs(g.x[0]) < 1e-9);
      CHECK(g.kappa == 1);
    }
  }
  SUBCASE("linear field off-center, the zero line missed") {
    const auto rep = classify_gamma(PolyMatrixField::planar(x(2, 0)), make_disk(pt(2, 0), 1.0));
    CHECK(rep.kappa_star == 0);
    CHECK(rep.kappa_0 == 0);
  }
  SUBCASE("constant field") {
    const auto dom = make_disk(pt(0, 0), 1.0);
    const auto rep = classify_gamma(PolyMatrixField::planar(c(2, 1.0)), dom);
    CHECK(rep.kappa_star == 0);
    CHECK(rep.kappa_0 == 0);
    CHECK(rep.gamma1.size() == rep.interior_samples);
    CHECK(rep.gamma2.size() == rep.gamma0.size());
    CHECK(rep.gamma2.size() == rep.boundary_samples);
  }
  SUBCASE("zero line off the lattice is found by refinement") {
    const auto b = PolyMatrixField::planar(x(2, 0) - c(2, 0.0137));
    const auto rep = classify_gamma(b, make_rectangle(pt(0, 0), pt(2, 2)));
    CHECK(rep.kappa_star == 1);
    CHECK(rep.kappa_0 == 1);
    for (const auto& g : rep.gamma1) CHECK(std::abs(g.x[0] - 0.0137) < 1e-9);
    CHECK(rep.gamma2.size() == 2);
  }
  SUBCASE("isolated interior zero of higher order") {
    const auto b = PolyMatrixField::planar(x(2, 0) * x(2, 0) + x(2, 1) * x(2, 1));
    const auto rep = classify_gamma(b, make_disk(pt(0, 0), 1.0));
    CHECK(rep.kappa_star == 2);
    CHECK(rep.kappa_0 == 0);
    REQUIRE(rep.gamma1.size() == 1);
    CHECK(rep.gamma1[0].x.norm() < 1e-12);
    CHECK(rep.gamma2.empty());
  }
  SUBCASE("every listed point has the reported order") {
    const auto b = PolyMatrixField::planar(x(2, 0) * x(2, 1));
    const auto rep = classify_gamma(b, make_star(pt(0.1, 0), {1.0, 0.1}, {0.0, 0.1}));
    for (const auto& g : rep.gamma1) CHECK(vanishing_order(b, g.x).kappa == rep.kappa_star);
    for (const auto& g : rep.gamma2) CHECK(vanishing_order(b, g.x).kappa == rep.kappa_star);
    for (const auto& g : rep.gamma0) CHECK(vanishing_order(b, g.x).kappa == rep.kappa_0);
  }
  SUBCASE("cap violations name the point") {
    const auto b = PolyMatrixField::planar(pow(x(2, 0), 4));
    GammaOptions opt;
    opt.kappa_max = 2;
    CHECK_THROWS_WITH_AS(classify_gamma(b, make_disk(pt(0, 0), 1.0), opt), doctest::Contains("at ("), GeometryError);
  }
}

TEST_CASE("classify_gamma is monotone under refinement") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 6; ++trial) {
    const auto b = PolyMatrixField::planar(maglap::testing::random_polynomial(rng, 2, 2) * x(2, 1));
    const auto dom = make_disk(pt(0, 0), 1.0);
    GammaOptions coarse;
    coarse.grid_step = 0.2;
    coarse.boundary_count = 32;
    GammaOptions fine = coarse;
    fine.grid_step = 0.1;
    fine.boundary_count = 64;
    const auto a = classify_gamma(b, dom, coarse);
    const auto f = classify_gamma(b, dom, fine);
    CHECK(f.kappa_star >= a.kappa_star);
    CHECK(f.kappa_0 >= a.kappa_0);
  }
}

TEST_CASE("distance to boundary") {
  CHECK(distance_to_boundary(make_disk(pt(0, 0), 2.0), pt(0.5, 0)) == doctest::Approx(1.5));
  CHECK(distance_to_boundary(make_rectangle(pt(0, 0), pt(2, 4)), pt(0.5, 0)) == doctest::Approx(0.5));
  CHECK(distance_to_boundary(make_star(pt(0, 0), {1.0}, {}), pt(0.25, 0)) == doctest::Approx(0.75).epsilon(1e-6));
}
