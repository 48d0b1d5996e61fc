#include <doctest.h>

#include "exradon/fourier.hpp"
#include "exradon/random.hpp"

using namespace exradon;

TEST_SUITE("fourier") {

TEST_CASE("Gaussian transform is a Gaussian") {
  Vector c(2);
  c << 0.5, -1.0;
  const auto g = AnalyticDensity::gaussian(2, 0.8, c);
  Vector xi(2);
  xi << 1.2, 0.7;
  const Complex expected = std::exp(-0.32 * xi.squaredNorm()) * std::exp(Complex(0, -c.dot(xi)));
  const Complex v = fourier_measure(g, xi);
  CHECK(std::abs(v - expected) < 1e-9);
}

TEST_CASE("disk transform is 2 pi J1(|xi|) / |xi|") {
  const auto disk = AnalyticDensity::ball_indicator(2);
  for (double r : {0.5, 2.0, 5.3}) {
    Vector xi(2);
    xi << r * std::cos(0.3), r * std::sin(0.3);
    const double expected = 2 * pi * std::cyl_bessel_j(1.0, r) / r;
    CHECK(std::abs(fourier_measure(disk, xi) - Complex(expected, 0.0)) < 1e-6);
  }
}

TEST_CASE("atomic transform is the exponential sum") {
  Matrix pts(2, 3);
  pts << 0.1, -1.0, 2.0, 0.4, 0.0, -0.5;
  Vector w(3);
  w << 1.0, -0.5, 2.0;
  Vector xi(2);
  xi << -0.7, 1.9;
  Complex direct = 0.0;
  for (int j = 0; j < 3; ++j) direct += w(j) * std::exp(Complex(0, -pts.col(j).dot(xi)));
  CHECK(std::abs(fourier_measure(AtomicMeasure(pts, w), xi) - direct) < 1e-14);
}

TEST_CASE("slice residuals are small for atoms, grids and analytic densities") {
  const Direction w = Direction::from_angle(0.9);
  std::vector<double> sigmas;
  for (int i = 0; i < 32; ++i) sigmas.push_back(-4.0 + 8.0 * i / 31);
  Philox rng(4);
  Matrix pts(2, 6);
  Vector wt(6);
  for (int j = 0; j < 6; ++j) {
    pts(0, j) = rng.normal();
    pts(1, j) = rng.normal();
    wt(j) = rng.normal();
  }
  CHECK(slice_residual(AtomicMeasure(pts, wt), w, sigmas).max_abs_diff < 1e-10);
  const auto g = AnalyticDensity::gaussian(2);
  CHECK(slice_residual(g, w, sigmas).max_abs_diff < 1e-4);
  const auto grid = GridDensity::sample(2, 128, 6.0, [&](const Vector& x) { return g(x); });
  CHECK(slice_residual(grid, w, sigmas).max_abs_diff < 1e-2);
}

TEST_CASE("slice rows carry the pushed-forward transform") {
  const auto g = AnalyticDensity::gaussian(2);
  const SliceReport r = slice_residual(g, Direction::from_angle(0.2), {0.0, 1.5});
  REQUIRE(r.rows.size() == 2);
  CHECK(std::abs(r.rows[0].slice - Complex(1.0, 0.0)) < 1e-8);
  CHECK(std::abs(r.rows[1].direct - Complex(std::exp(-1.125), 0.0)) < 1e-8);
}

TEST_CASE("infinite measures have no transform") {
  const PolarHomogeneous p{2, -3.5, AngularDensity::constant(2, 1.0), 0.0};
  CHECK_THROWS_AS(fourier_measure(p, Vector::Ones(2)), Error);
  try {
    fourier_measure(AnalyticDensity::inverse_zk(2), Vector::Ones(2));
    FAIL("expected InfiniteMass");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfiniteMass);
  }
}

}  // TEST_SUITE
