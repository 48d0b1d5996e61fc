#include <doctest.h>

#include "exradon/radon.hpp"
#include "exradon/random.hpp"

#include <map>
#include "exradon/sphere.hpp"

using namespace exradon;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

AtomicMeasure random_atoms(int d, int n, std::uint64_t seed) {
  Philox rng(seed);
  Matrix pts(d, n);
  Vector w(n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < d; ++k) pts(k, j) = rng.normal();
    w(j) = rng.normal();
  }
  return AtomicMeasure(pts, w);
}

}  // namespace

TEST_SUITE("radon") {

TEST_CASE("Gaussian line and plane integrals match the one-dimensional density") {
  const auto g2 = AnalyticDensity::gaussian(2);
  for (double p : {-2.0, -0.3, 0.0, 1.1, 3.0}) {
    const Hyperplane l{Direction::from_angle(0.7), p};
    CHECK(hyperplane_integral(g2, l).value == doctest::Approx(std::exp(-p * p / 2) / std::sqrt(2 * pi)).epsilon(1e-12));
  }
  const auto g3 = AnalyticDensity::gaussian(3);
  const Hyperplane l3{Direction::normalized(Vector::Ones(3)), 0.7};
  CHECK(hyperplane_integral(g3, l3).value == doctest::Approx(std::exp(-0.49 / 2) / std::sqrt(2 * pi)).epsilon(1e-10));
}

TEST_CASE("disk chords") {
  const auto disk = AnalyticDensity::ball_indicator(2);
  for (double p : {-0.99, -0.5, 0.0, 0.3, 0.9}) {
    const double exact = 2 * std::sqrt(1 - p * p);
    CHECK(hyperplane_integral(disk, Hyperplane{Direction::from_angle(1.3), p}).value == doctest::Approx(exact).epsilon(1e-10));
  }
  const auto grid = GridDensity::sample(2, 256, 1.5, [&](const Vector& x) { return disk(x); }, 4);
  for (double p : {-0.5, 0.0, 0.3}) {
    const double exact = 2 * std::sqrt(1 - p * p);
    CHECK(std::abs(hyperplane_integral(grid, Hyperplane{Direction::from_angle(1.3), p}) - exact) < 5e-3);
  }
}

TEST_CASE("sinograms are even under (omega, p) -> (-omega, -p)") {
  SinogramSampling s{2, 36, -2.0, 2.0, 41};
  Vector c(2);
  c << 0.4, -0.3;
  const auto g = AnalyticDensity::gaussian(2, 0.7, c);
  CHECK(radon_forward(g, s).evenness_defect() < 1e-9);
  // a phantom that vanishes near the grid edge, so no sample straddles a jump
  const auto b = AnalyticDensity::bump(BumpFunction(c, 1.2));
  const auto grid = GridDensity::sample(2, 64, 2.0, [&](const Vector& x) { return b(x); });
  CHECK(radon_forward(grid, s).evenness_defect() < 1e-9);
}

TEST_CASE("sampling invariants are enforced") {
  CHECK_THROWS_AS((SinogramSampling{2, 3, -1, 1, 16}.validate()), Error);
  CHECK_THROWS_AS((SinogramSampling{2, 8, -1, 1, 4}.validate()), Error);
  CHECK_THROWS_AS((SinogramSampling{2, 8, 1, -1, 16}.validate()), Error);
  SinogramSampling s{2, 8, -1, 1, 16};
  const Sinogram sino = radon_forward(AnalyticDensity::gaussian(2), s);
  CHECK_THROWS_AS(sino.interpolate(0, 1.5), Error);
}

TEST_CASE("adjointness on 256^2 grids with 180 directions") {
  const auto g = AnalyticDensity::gaussian(2);
  const auto gg = GridDensity::sample(2, 256, 6.0, [&](const Vector& x) { return g(x); });
  const auto r = adjoint_residual(gg, [](const Vector&, double p) { return std::exp(-p * p / 2); }, 180);
  CHECK(r.residual < 1e-2);
  // independent value of <R phi, psi> for the standard Gaussian: int e^{-p^2} / sqrt(2 pi) dp
  CHECK(r.sinogram_side == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-3));
  const auto disk = AnalyticDensity::ball_indicator(2);
  const auto gd = GridDensity::sample(2, 256, 1.5, [&](const Vector& x) { return disk(x); }, 4);
  const BumpFunction b = BumpFunction::on_line(0.2, 0.6);
  CHECK(adjoint_residual(gd, [&](const Vector&, double p) { return b(p); }, 180).residual < 1e-2);
}

TEST_CASE("dual transform of a function of p alone") {
  const Matrix dirs = uniform_directions(2, 360);
  Vector x(2);
  x << 0.6, -0.2;
  // mean over the circle of (x . omega)^2 is |x|^2 / 2
  const double v = dual_transform([](const Vector&, double p) { return p * p; }, dirs, x);
  CHECK(v == doctest::Approx(x.squaredNorm() / 2).epsilon(1e-12));
}

TEST_CASE("halfspace masses") {
  const auto g = AnalyticDensity::gaussian(2);
  for (double p : {-1.5, 0.0, 0.8}) CHECK(halfspace_mass(g, Halfspace{Direction::from_angle(2.0), p}) == doctest::Approx(normal_cdf(p)).epsilon(1e-9));
  const auto atoms = random_atoms(3, 25, 5);
  const Halfspace h{Direction::normalized(Vector::Ones(3)), 0.1};
  double direct = 0.0;
  for (Eigen::Index j = 0; j < atoms.size(); ++j)
    if (h.contains(atoms.points.col(j))) direct += atoms.weights(j);
  CHECK(halfspace_mass(atoms, h) == doctest::Approx(direct));
  const PolarHomogeneous p{2, -3.5, AngularDensity::constant(2, 1.0), 0.0};
  const double h1 = halfspace_mass(p, Halfspace{Direction::from_angle(0.1), -1.0});
  const double h2 = halfspace_mass(p, Halfspace{Direction::from_angle(0.1), -2.0});
  CHECK(h2 / h1 == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-9));
  CHECK_THROWS_AS(halfspace_mass(p, Halfspace{Direction::from_angle(0.1), 0.5}), Error);
}

TEST_CASE("Monte Carlo halfspace mass agrees with the closed form") {
  const Halfspace h{Direction::normalized(Vector::Ones(4)), 0.3};
  const auto [v, se] = halfspace_mass_monte_carlo(AnalyticDensity::gaussian(4), h, 200000, 9);
  CHECK(std::abs(v - normal_cdf(0.3)) < 4 * se);
}

TEST_CASE("halfspace mass is non-decreasing in p for non-negative measures") {
  const auto disk = AnalyticDensity::ball_indicator(2);
  const Direction w = Direction::from_angle(0.4);
  double prev = -1.0;
  for (double p = -1.2; p <= 1.2; p += 0.1) {
    const double m = halfspace_mass(disk, Halfspace{w, p});
    CHECK(m >= prev - 1e-12);
    prev = m;
  }
}

TEST_CASE("push-forward pairing against phi equals minus the halfspace values against phi'") {
  const BumpFunction phi = BumpFunction::on_line(0.3, 1.0);
  const Direction w = Direction::from_angle(0.4);
  Vector a(2);
  a << 0.3, 0.4;
  CHECK(halfspace_derivative_residual(AtomicMeasure::dirac(a), w, phi).residual < 1e-10);
  CHECK(halfspace_derivative_residual(AnalyticDensity::gaussian(2), w, phi).residual < 1e-4);
  CHECK(halfspace_derivative_residual(AnalyticDensity::ball_indicator(2), w, phi).residual < 1e-3);
}

TEST_CASE("push-forward norm never exceeds the measure norm") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto m = random_atoms(2, 12, seed);
    const auto pf = radon_pushforward(m, Direction::from_angle(0.1 * seed));
    REQUIRE(pf.atoms);
    // merge atoms that project to the same point
    std::map<double, double> merged;
    for (Eigen::Index j = 0; j < pf.atoms->size(); ++j) merged[pf.atoms->points(0, j)] += pf.atoms->weights(j);
    double norm = 0.0;
    for (const auto& [p, w] : merged) norm += std::abs(w);
    CHECK(norm <= m.weights.cwiseAbs().sum() + 1e-12);
    CHECK(pf.integrate([](double) { return 1.0; }) == doctest::Approx(m.weights.sum()));
  }
}

TEST_CASE("distinct atomic measures have distinct sinograms") {
  const auto a = random_atoms(2, 5, 21);
  const auto b = random_atoms(2, 5, 22);
  const Matrix dirs = uniform_directions(2, 32);
  double sup = 0.0;
  for (Eigen::Index i = 0; i < dirs.cols(); ++i) {
    const Direction w(Vector(dirs.col(i)));
    for (double p = -3.0; p <= 3.0; p += 0.05) {
      const double fa = halfspace_mass(a, Halfspace{w, p}), fb = halfspace_mass(b, Halfspace{w, p});
      sup = std::max(sup, std::abs(fa - fb));
    }
  }
  CHECK(sup > 1e-6);
}

TEST_CASE("inversion check of the zero phantom has zero residual") {
  const auto z = GridDensity::sample(3, 12, 1.0, [](const Vector&) { return 0.0; });
  const InversionReport r = odd_d_inversion_check(z, InversionSettings{16, 17});
  CHECK(r.residual == 0.0);
}

TEST_CASE("inversion check on a coarse grid (the 64^3 contract runs as its own ctest)") {
  const auto g = AnalyticDensity::gaussian(3, 0.5);
  const auto grid = GridDensity::sample(3, 24, 3.0, [&](const Vector& x) { return g(x); });
  const InversionReport r = odd_d_inversion_check(grid, InversionSettings{128, 65});
  CHECK(r.c > 0.0);
  CHECK(r.residual < 0.2);
}

}  // TEST_SUITE
