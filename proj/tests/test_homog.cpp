#include <doctest.h>

#include "exradon/homog.hpp"
#include "exradon/quadrature.hpp"

using namespace exradon;

namespace {

// Hadamard finite part of int_0^inf x^gamma phi(x) dx for -4 < gamma < -1,
// non-integral: the Taylor remainder of order k is written in integral form
// so nothing cancels near 0, and the subtracted monomials are integrated in
// closed form over [0, 1].
double finite_part(double gamma, const BumpFunction& phi) {
  const int k = static_cast<int>(std::floor(-gamma - 1.0)) + 1;
  const auto jet = phi.derivatives(0.0);
  const Rule1D outer = composite_gauss(0.0, 1.0, 32, 16);
  const Rule1D inner = composite_gauss(0.0, 1.0, 8, 16);
  double kfact = 1.0;
  for (int j = 2; j < k; ++j) kfact *= j;
  double v = outer.integrate([&](double t) {
    const double x = t * t;
    const double rem = inner.integrate([&](double u) { return std::pow(1.0 - u, k - 1) * phi.derivatives(u * x)[k]; });
    return 2.0 * t * std::pow(x, gamma + k) * rem / kfact;
  });
  const double hi = phi.center()(0) + phi.radius();
  if (hi > 1.0) v += composite_gauss(1.0, hi, 64, 16).integrate([&](double x) { return std::pow(x, gamma) * phi(x); });
  double fact = 1.0;
  for (int j = 0; j < k; ++j) {
    if (j > 0) fact *= j;
    v += jet[j] / (fact * (gamma + j + 1.0));
  }
  return v;
}

}  // namespace

TEST_SUITE("homog") {

TEST_CASE("locally integrable powers need no extension") {
  const BumpFunction phi = BumpFunction::on_line(0.3, 1.0);
  const HalflinePower hp = HalflinePower::halfline(-0.5);
  CHECK(hp.k == 0);
  const double direct = graded_toward_left(0.0, 1.3, 0.05).integrate([&](double x) { return std::pow(x, -0.5) * phi(x); });
  CHECK(extend_halfline(-0.5, phi) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("the extension is the plain integral for test functions supported in x > 0") {
  const BumpFunction phi = BumpFunction::on_line(1.5, 0.6);
  for (double gamma : {-1.5, -2.5, -3.5, -2.0}) {
    const double direct = composite_gauss(0.9, 2.1, 32, 16).integrate([&](double x) { return std::pow(x, gamma) * phi(x); });
    CHECK(extend_halfline(gamma, phi) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("extension across 0 equals the finite part") {
  const BumpFunction phi = BumpFunction::on_line(0.3, 1.0);
  for (double gamma : {-1.5, -2.5, -3.5, -1.2}) CHECK(std::abs(extend_halfline(gamma, phi) - finite_part(gamma, phi)) < 1e-6);
  const BumpFunction psi = BumpFunction::on_line(-0.1, 0.5, 2.0);
  CHECK(std::abs(extend_halfline(-2.5, psi) - finite_part(-2.5, psi)) < 1e-6);
}

TEST_CASE("non-integral degrees give homogeneous extensions") {
  const BumpFunction phi = BumpFunction::on_line(0.3, 1.0);
  for (double gamma : {-1.5, -2.5, -3.5, -0.3})
    for (double lambda : {0.5, 2.0, 3.0}) {
      const double scale = std::max(1.0, std::abs(extend_halfline(gamma, phi.scaled(lambda))));
      CHECK(homogeneity_defect(gamma, phi, lambda) / scale < 1e-8);
    }
}

TEST_CASE("the logarithmic extension at gamma = -1 is not homogeneous") {
  const BumpFunction phi = BumpFunction::on_line(0.3, 1.0);
  const HalflinePower hp = HalflinePower::halfline(-1.0);
  CHECK(hp.logarithmic);
  const double pairing = extend_halfline(-1.0, phi);
  // <x~^-1, phi(./lambda)> - <x~^-1, phi> = -log(lambda) phi(0) for this primitive
  for (double lambda : {0.5, 2.0}) {
    CHECK(homogeneity_defect(-1.0, phi, lambda) == doctest::Approx(std::abs(std::log(lambda) * phi(0.0))).epsilon(1e-8));
    CHECK(homogeneity_defect(-1.0, phi, lambda) / std::abs(pairing) > 0.1);
  }
}

TEST_CASE("more than three derivatives are refused") {
  const BumpFunction phi = BumpFunction::on_line(0.3, 1.0);
  const HalflinePower hp = HalflinePower::halfline(-4.5);
  CHECK(hp.k == 4);
  try {
    extend_halfline(-4.5, phi);
    FAIL("expected DerivativeOrderUnsupported");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DerivativeOrderUnsupported);
  }
}

TEST_CASE("polar extension of a constant angular part reduces to the half line") {
  // radial profile of the ball bump of radius R is the line bump on [-R, R]
  const BumpFunction ball(Vector::Zero(2), 0.8);
  const BumpFunction line = BumpFunction::on_line(0.0, 0.8);
  for (double gamma : {-2.5, -3.5, -3.2}) {
    const double v = extend_polar(AngularDensity::constant(2, 1.0), gamma, ball);
    CHECK(v == doctest::Approx(2 * pi * finite_part(gamma + 1.0, line)).epsilon(1e-6));
  }
}

TEST_CASE("polar extension is homogeneous and agrees with the measure away from 0") {
  const AngularDensity u = AngularDensity::harmonic(2, 0.4, 0.0, 1.0);
  Vector c(2);
  c << 0.2, 0.1;
  const BumpFunction phi(c, 0.7);
  const double base = extend_polar(u, -2.5, phi);
  for (double lambda : {0.5, 2.0})
    CHECK(extend_polar(u, -2.5, phi.scaled(lambda)) == doctest::Approx(std::pow(lambda, -0.5) * base).epsilon(1e-8));
  Vector far(2);
  far << 1.5, -0.8;
  const BumpFunction away(far, 0.6);
  const PolarHomogeneous m{2, -2.5, u, 0.0};
  CHECK(extend_polar(u, -2.5, away) == doctest::Approx(eval_measure_pairing(m, away)).epsilon(1e-8));
  // spectral angular part: the degree -d - beta measure beta r^{-beta-1} dr S
  const SpectralMeasure s = SpectralMeasure::uniform(2, 8);
  const PolarHomogeneous ms{2, -3.5, s, 0.0};
  CHECK(extend_polar(s, -3.5, away) == doctest::Approx(eval_measure_pairing(ms, away)).epsilon(1e-8));
}

TEST_CASE("integral degrees are refused in the polar extension") {
  const BumpFunction phi(Vector::Zero(2), 0.5);
  try {
    extend_polar(AngularDensity::constant(2, 1.0), -3.0, phi);
    FAIL("expected IntegralDegree");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IntegralDegree);
  }
}

TEST_CASE("sphere moments") {
  const auto idx = multi_indices(2, 2);
  REQUIRE(idx.size() == 3);
  CHECK(idx[0] == std::vector<int>{2, 0});
  CHECK(idx[2] == std::vector<int>{0, 2});
  const MomentSet m = moment_condition(AngularDensity::harmonic(2, 1.0), 2);
  CHECK(m.values[0] == doctest::Approx(pi / 2));
  CHECK(std::abs(m.values[1]) < 1e-12);
  CHECK(m.values[2] == doctest::Approx(-pi / 2));
  // order-2 moments of cos(4 theta) vanish
  CHECK(moment_condition(AngularDensity::harmonic(4, 1.0), 2).max_abs() < 1e-12);
  CHECK(multi_indices(3, 2).size() == 6);
  const MomentSet z = moment_condition([](const Vector& w) { return w(2); }, 3, 1, 64);
  CHECK(z.values[2] == doctest::Approx(4 * pi / 3).epsilon(1e-10));
}

}  // TEST_SUITE
