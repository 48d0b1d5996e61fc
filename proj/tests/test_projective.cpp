#include <doctest.h>

#include "exradon/projective.hpp"
#include "exradon/random.hpp"
#include "exradon/sphere.hpp"

using namespace exradon;

TEST_SUITE("projective") {

TEST_CASE("psi and its inverse are mutually inverse") {
  Philox rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 2;
    Vector x(d);
    for (int k = 0; k < d; ++k) x(k) = 2 * rng.normal();
    x(d - 1) = std::abs(x(d - 1));
    CHECK((psi_inverse(psi_map(x)) - x).norm() < 1e-12 * (1 + x.norm()));
  }
  Vector pole(2);
  pole << 0.3, -1.0;
  try {
    psi_map(pole);
    FAIL("expected PoleHit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PoleHit);
  }
  Vector top(2);
  top << 0.3, 1.0;
  CHECK_THROWS_AS(psi_inverse(top), Error);
}

TEST_CASE("the cone maps into the truncated cone") {
  const ConeSpec q{1.0};
  Philox rng(9);
  Matrix xs(3, 200);
  for (int j = 0; j < 200; ++j) {
    const double r = 5 * rng.uniform();
    const double a = 2 * pi * rng.uniform();
    const double rho = rng.uniform() * r;
    xs.col(j) << rho * std::cos(a), rho * std::sin(a), r;
  }
  CHECK(cone_image_check(q, xs));
  Matrix outside(3, 1);
  outside << 2.0, 0.0, 1.0;
  CHECK_FALSE(cone_image_check(q, outside));
}

TEST_CASE("the sphere lift lands on the upper hemisphere") {
  Vector x(2);
  x << 0.6, -2.0;
  const Vector s = sphere_lift(x);
  CHECK(s.size() == 3);
  CHECK(s.norm() == doctest::Approx(1.0));
  CHECK(s(2) > 0);
  CHECK(s(0) / s(2) == doctest::Approx(0.6));
}

TEST_CASE("hyperplane Jacobian matches finite differences of arc length") {
  const ProjectiveMap m = ProjectiveMap::psi_inverse(2);
  const Hyperplane lt{Direction::from_angle(0.8), 0.25};
  const Vector e = orthonormal_complement(lt.omega.vec()).col(0);
  for (double s : {-1.0, -0.2, 0.4}) {
    const Vector y = lt.p * lt.omega.vec() + s * e;
    const double h = 1e-6;
    const Vector a = psi_inverse(Vector(y + h * e)), b = psi_inverse(Vector(y - h * e));
    CHECK(hyperplane_jacobian(m, lt, y) == doctest::Approx((a - b).norm() / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("the Jacobian factors into a line factor and a point factor") {
  Philox rng(12);
  for (int i = 0; i < 8; ++i) {
    const Hyperplane lt{Direction::from_angle(2 * pi * rng.uniform()), -0.6 + 1.2 * rng.uniform()};
    const Vector e = orthonormal_complement(lt.omega.vec()).col(0);
    Matrix ys(2, 32);
    for (int j = 0; j < 32; ++j) ys.col(j) = lt.p * lt.omega.vec() + (-1.5 + 3.0 * j / 31) * e;
    for (int j = 0; j < 32; ++j)
      if (std::abs(1.0 - ys(1, j)) < 0.05) ys.col(j) = lt.p * lt.omega.vec() - 1.6 * e;
    CHECK(factorization_defect(lt, ys) < 1e-4);
  }
  Matrix off(2, 2);
  off << 5.0, 6.0, 5.0, 6.0;
  CHECK_THROWS_AS(factorization_defect(Hyperplane{Direction::from_angle(0.0), 0.0}, off), Error);
}

TEST_CASE("an affine map has a constant Jacobian equal to the stretch of the line") {
  Matrix a(2, 2);
  a << 2.0, 0.5, 0.0, 1.0;
  Vector b(2);
  b << 1.0, -3.0;
  const ProjectiveMap m = ProjectiveMap::affine(a, b);
  const Hyperplane l{Direction::from_angle(0.3), 0.1};
  const Vector e = orthonormal_complement(l.omega.vec()).col(0);
  const double stretch = (a * e).norm();
  for (double s : {-2.0, 0.0, 3.0}) CHECK(hyperplane_jacobian(m, l, Vector(l.p * l.omega.vec() + s * e)) == doctest::Approx(stretch));
  CHECK(m.point_factor(Vector::Ones(2)) == doctest::Approx(1.0));
}

TEST_CASE("psi carries lines to the stated image lines") {
  Philox rng(14);
  for (int i = 0; i < 20; ++i) {
    const Hyperplane l{Direction::from_angle(2 * pi * rng.uniform()), 3 * rng.normal()};
    if (std::abs(l.omega(1)) > 0.999) continue;
    const Hyperplane img = psi_image(l);
    const Vector e = orthonormal_complement(l.omega.vec()).col(0);
    for (double s : {-3.0, 0.5, 2.0}) {
      const Vector x = l.p * l.omega.vec() + s * e;
      if (std::abs(1 + x(1)) < 0.1) continue;
      CHECK(std::abs(img.signed_distance(psi_map(x))) < 1e-10);
    }
  }
  CHECK_THROWS_AS(psi_image(Hyperplane{Direction::from_angle(pi / 2), -1.0}), Error);
}

TEST_CASE("Radon data agree between x-space and y-space") {
  const SinogramSampling s{2, 12, -4.0, 4.0, 17};
  Vector c(2);
  c << -0.3, 1.5;
  const RadonDataPair r = transform_radon_data(AnalyticDensity::bump(BumpFunction(c, 0.8)), s);
  CHECK(r.rel_diff < 1e-3);
  Vector cc(2);
  cc << 0.2, 1.2;
  const RadonDataPair rc = transform_radon_data(AnalyticDensity::cone_gaussian(2, 0.5, 1.0, cc), s);
  CHECK(rc.rel_diff < 1e-3);
  // the x-space side is the ordinary transform
  const Sinogram direct = radon_forward(AnalyticDensity::bump(BumpFunction(c, 0.8)), s);
  CHECK((direct.values - r.x_space.values).cwiseAbs().maxCoeff() < 1e-12);
}

}  // TEST_SUITE
