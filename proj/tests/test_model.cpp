#include <doctest.h>

#include "exradon/io.hpp"
#include "exradon/model.hpp"
#include "exradon/quadrature.hpp"
#include "exradon/random.hpp"
#include "exradon/sphere.hpp"

using namespace exradon;

TEST_SUITE("model") {

TEST_CASE("Gauss-Legendre integrates polynomials up to degree 2n-1 exactly") {
  for (int n : {2, 5, 16}) {
    const Rule1D r = gauss_legendre(n, -0.5, 2.0);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      const double exact = (std::pow(2.0, k + 1) - std::pow(-0.5, k + 1)) / (k + 1);
      CHECK(r.integrate([&](double x) { return std::pow(x, k); }) == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("graded rule handles an inverse square root singularity") {
  const Rule1D r = graded_toward_left(0.0, 1.0, 0.1);
  CHECK(r.integrate([](double x) { return 1.0 / std::sqrt(x); }) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(r.integrate([](double x) { return std::log(x); }) == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("sphere rules carry the full surface area") {
  CHECK(sphere_area(2) == doctest::Approx(2 * pi));
  CHECK(sphere_area(3) == doctest::Approx(4 * pi));
  for (int d : {2, 3}) {
    const SphereRule r = sphere_rule(d, 24);
    CHECK(r.weights.sum() == doctest::Approx(sphere_area(d)).epsilon(1e-12));
    // the second moment of omega_0 is area / d
    double m2 = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) m2 += r.weights(i) * r.nodes(0, i) * r.nodes(0, i);
    CHECK(m2 == doctest::Approx(sphere_area(d) / d).epsilon(1e-12));
  }
}

TEST_CASE("direction sets are unit vectors") {
  const Matrix f = fibonacci_directions(200);
  const Matrix e = equiangular_directions(37);
  CHECK((f.colwise().norm().array() - 1.0).abs().maxCoeff() < 1e-14);
  CHECK((e.colwise().norm().array() - 1.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("orthonormal complement is orthonormal and orthogonal to omega") {
  Philox rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 4;
    Vector v(d);
    for (int k = 0; k < d; ++k) v(k) = rng.normal();
    v.normalize();
    const Matrix b = orthonormal_complement(v);
    CHECK(b.cols() == d - 1);
    CHECK((b.transpose() * b - Matrix::Identity(d - 1, d - 1)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((b.transpose() * v).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("Philox streams are reproducible and distinct") {
  Philox a(42, 0), b(42, 0), c(42, 1), e(43, 0);
  bool differs_stream = false, differs_seed = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs_stream |= x != c.next_u64();
    differs_seed |= x != e.next_u64();
  }
  CHECK(differs_stream);
  CHECK(differs_seed);
  Philox u(7);
  double mean = 0.0, lo = 1.0, hi = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = u.uniform();
    mean += x / n;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(mean == doctest::Approx(0.5).epsilon(5e-3));
}

TEST_CASE("directions and hyperplanes") {
  Vector v(2);
  v << 1.0, 1.0;
  CHECK_THROWS_AS(Direction{v}, Error);
  const Hyperplane l{Direction::from_angle(2.0), 0.7};
  const Hyperplane m{-l.omega, -0.7};
  CHECK(l.same_as(m));
  CHECK(l.canonical().omega(0) > 0);
  Vector x(2);
  x << 0.3, -0.2;
  CHECK(l.signed_distance(x) == doctest::Approx(-m.signed_distance(x)));
}

TEST_CASE("grid interpolation reproduces node values and vanishes outside") {
  const auto g = GridDensity::sample(3, 9, 1.0, [](const Vector& x) { return x(0) + 2 * x(1) - x(2) * x(2); });
  for (std::size_t i = 0; i < g.size(); i += 37) CHECK(g.interpolate(g.node(i)) == doctest::Approx(g.samples()[i]));
  // node (i0, i1, i2) is stored at (i0 n + i1) n + i2
  const std::size_t flat = (2 * 9 + 5) * 9 + 7;
  const Vector x = g.node(flat);
  CHECK(x(0) == doctest::Approx(-1.0 + 2 * 0.25));
  CHECK(x(1) == doctest::Approx(-1.0 + 5 * 0.25));
  CHECK(x(2) == doctest::Approx(-1.0 + 7 * 0.25));
  Vector out = Vector::Constant(3, 1.5);
  CHECK(g.interpolate(out) == 0.0);
  // trilinear interpolation is exact for multilinear functions
  const auto lin = GridDensity::sample(2, 5, 1.0, [](const Vector& y) { return 1 + y(0) - 3 * y(1) + y(0) * y(1); });
  Vector y(2);
  y << 0.33, -0.71;
  CHECK(lin.interpolate(y) == doctest::Approx(1 + 0.33 + 3 * 0.71 - 0.33 * 0.71));
}

TEST_CASE("masses and total variation") {
  CHECK(total_mass(AnalyticDensity::gaussian(2)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(total_mass(AnalyticDensity::gaussian(3)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(total_mass(AnalyticDensity::ball_indicator(2)) == doctest::Approx(pi).epsilon(1e-10));
  // mass of |x| > r for a homogeneous measure of index beta scales as r^-beta
  const PolarHomogeneous p{2, -3.5, SpectralMeasure::uniform(2, 16), 0.0};
  CHECK(total_variation(p, 0.5) / total_variation(p, 1.0) == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-10));
  Matrix pts(2, 3);
  pts << 0, 1, 2, 0, 1, 2;
  Vector w(3);
  w << 1.0, -2.0, 0.5;
  CHECK(total_variation(AtomicMeasure(pts, w), 0.0) == doctest::Approx(3.5));
  CHECK(total_variation(AtomicMeasure(pts, w), 1.0) == doctest::Approx(2.5));
}

TEST_CASE("homogeneous pairing against a radial shell matches a one-dimensional oracle") {
  PolarHomogeneous p;
  p.dim = 2;
  p.degree = -3.0;
  p.angular = AngularDensity::constant(2, 1.0);
  const BumpFunction b(Vector::Zero(2), 0.3, 1.0, 1.5);
  const Rule1D r = composite_gauss(1.2, 1.8, 32, 16);
  const double oracle = 2 * pi * r.integrate([](double t) {
    const double s = (t - 1.5) / 0.3;
    return std::pow(t, -3.0) * std::exp(-1.0 / (1.0 - s * s)) * t;
  });
  CHECK(eval_measure_pairing(p, b) == doctest::Approx(oracle).epsilon(1e-10));
  const BumpFunction near(Vector::Zero(2), 0.5);
  CHECK_THROWS_AS(eval_measure_pairing(p, near), Error);
}

TEST_CASE("homogeneous pairings scale with the degree") {
  const PolarHomogeneous p{2, -3.0, AngularDensity::harmonic(2, 0.5, 0.1, 1.0), 0.0};
  Vector c(2);
  c << 2.0, 1.0;
  const BumpFunction b(c, 0.5);
  for (double lambda : {0.5, 2.0, 3.7}) {
    const double lhs = eval_measure_pairing(p, TestFunction(b).scaled(lambda));
    CHECK(lhs == doctest::Approx(std::pow(lambda, -1.0) * eval_measure_pairing(p, b)).epsilon(1e-9));
  }
}

TEST_CASE("derivative densities agree with finite differences") {
  const auto f = AnalyticDensity::inverse_zk(2);
  const auto g = AnalyticDensity::derivative_trick(f, {1, 0});
  const auto g2 = AnalyticDensity::derivative_trick(f, {1, 1});
  Vector x(2);
  x << 0.7, -1.3;
  const double h = 1e-5;
  const Vector e0 = Vector::Unit(2, 0), e1 = Vector::Unit(2, 1);
  CHECK(g(x) == doctest::Approx((f(Vector(x + h * e0)) - f(Vector(x - h * e0))) / (2 * h)).epsilon(1e-8));
  const double fd2 = (f(Vector(x + h * e0 + h * e1)) - f(Vector(x + h * e0 - h * e1)) - f(Vector(x - h * e0 + h * e1)) +
                      f(Vector(x - h * e0 - h * e1))) /
                     (4 * h * h);
  CHECK(g2(x) == doctest::Approx(fd2).epsilon(1e-5));
  // Re(1/z^2) = (x^2 - y^2) / r^4
  const double r2 = x.squaredNorm();
  CHECK(f(x) == doctest::Approx((x(0) * x(0) - x(1) * x(1)) / (r2 * r2)).epsilon(1e-14));
}

TEST_CASE("measures round-trip through JSON") {
  Philox rng(3);
  Matrix pts(3, 4);
  Vector w(4);
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 3; ++k) pts(k, j) = rng.normal();
    w(j) = rng.normal();
  }
  Vector c(2);
  c << 0.2, 1.2;
  const std::vector<MeasureModel> models{
      GridDensity::sample(2, 5, 1.0, [](const Vector& x) { return std::exp(x(0) - x(1)); }),
      AtomicMeasure(pts, w),
      PolarHomogeneous{2, -3.5, SpectralMeasure::uniform(2, 5, 2.0), 1.0},
      PolarHomogeneous{3, -3.0, AngularDensity::zonal(2, 1.0, 0.5), 0.0},
      AnalyticDensity::cone_gaussian(2, 0.5, 1.0, c),
      AnalyticDensity::derivative_trick(AnalyticDensity::inverse_zk(2), {1, 1}),
  };
  for (const auto& m : models) {
    const Json j = to_json(m);
    const Json again = to_json(measure_from_json(Json::parse(j.dump())));
    CHECK(j == again);
  }
  const MeasureModel back = measure_from_json(to_json(models[0]));
  const auto& g0 = std::get<GridDensity>(models[0]);
  const auto& g1 = std::get<GridDensity>(back);
  CHECK(g0.samples() == g1.samples());
  CHECK(g0.spacing() == g1.spacing());
}

TEST_CASE("measure JSON rejects unknown fields and kinds") {
  Json j = to_json(AnalyticDensity::gaussian(2));
  j["extra"] = 1;
  CHECK_THROWS_AS(measure_from_json(j), Error);
  CHECK_THROWS_AS(measure_from_json(Json{{"kind", "wavelet"}}), Error);
  CHECK_THROWS_AS(measure_from_json(Json{{"kind", "atomic"}, {"dim", 2}, {"points", {{0.0, 1.0}}}, {"weights", {1.0, 2.0}}}),
                  Error);
  try {
    measure_from_json(Json::object());
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
  }
}

}  // TEST_SUITE
