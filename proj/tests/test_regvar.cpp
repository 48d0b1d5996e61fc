#include <doctest.h>

#include "exradon/regvar.hpp"
#include "exradon/sphere.hpp"

using namespace exradon;

namespace {

SpectralMeasure three_atoms() {
  Matrix a(2, 3);
  a << 1.0, std::sqrt(0.5), 0.0, 0.0, std::sqrt(0.5), 1.0;
  Vector w(3);
  w << 0.3, 0.4, 0.3;
  return SpectralMeasure(a, w);
}

// sum_j w_j ((-omega) . theta_j)_+^beta, written out directly
double b_direct(const SpectralMeasure& s, double beta, const Vector& omega) {
  double v = 0.0;
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    const double c = -omega.dot(s.atoms.col(j));
    if (c > 0) v += s.weights(j) * std::pow(c, beta);
  }
  return v;
}

}  // namespace

TEST_SUITE("regvar") {

TEST_CASE("spectral forward map") {
  const SpectralMeasure s = three_atoms();
  for (double a : {0.0, 1.0, 3.5, 4.0, 5.5})
    CHECK(spectral_forward(s, 1.5, Direction::from_angle(a)) == doctest::Approx(b_direct(s, 1.5, Direction::from_angle(a).vec())));
}

TEST_CASE("the Pareto model scales exactly: t^beta rho(H_{w,-t}) = b(w) for t >= 1") {
  const SpectralMeasure s = three_atoms();
  const double beta = 1.5;
  const ScalingFamily f{MeasureModel(PolarHomogeneous{2, -beta - 2, s, 1.0}), beta, {}};
  for (double a : {3.5, 4.0, 4.5})
    for (double t : {1.0, 7.0, 100.0}) {
      const Direction w = Direction::from_angle(a);
      CHECK(scaled_halfspace(f, w, -1.0, t).value == doctest::Approx(b_direct(s, beta, w.vec())).epsilon(1e-9));
    }
  CHECK_THROWS_AS(scaled_halfspace(f, Direction::from_angle(0.0), 0.5, 2.0), Error);
}

TEST_CASE("Monte Carlo scaled halfspace values are within their standard error") {
  const SpectralMeasure s = three_atoms();
  const double beta = 0.8;
  const SampleSet xs = pareto_samples(2, beta, 200000, 5, s);
  CHECK(xs.generator_id.rfind("philox4x32-10", 0) == 0);
  const ScalingFamily f{xs, beta, {}};
  const Direction w = Direction::from_angle(4.0);
  const Estimate e = scaled_halfspace(f, w, -1.0, 10.0);
  CHECK(e.std_error > 0);
  CHECK(std::abs(e.value - b_direct(s, beta, w.vec())) < 4 * e.std_error);
}

TEST_CASE("sampling is reproducible per seed") {
  const SampleSet a = pareto_samples(3, 2.0, 1000, 77), b = pareto_samples(3, 2.0, 1000, 77), c = pareto_samples(3, 2.0, 1000, 78);
  CHECK(a.samples == b.samples);
  CHECK(a.samples != c.samples);
  CHECK((a.samples.colwise().norm().array() >= 1.0 - 1e-12).all());
}

TEST_CASE("Hill estimator") {
  const SampleSet xs = pareto_samples(2, 1.7, 100000, 3);
  const TailIndex t = tail_index_estimate(xs);
  CHECK(t.k == 316);
  CHECK(t.ci_lo < 1.7);
  CHECK(t.ci_hi > 1.7);
  CHECK(std::abs(t.beta_hat - 1.7) < 0.3);
  SampleSet tiny = xs;
  tiny.samples = xs.samples.leftCols(2);
  try {
    tail_index_estimate(tiny, 2);
    FAIL("expected TooFewSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewSamples);
  }
}

TEST_CASE("slowly varying factor") {
  const SlowlyVarying l{2.0, 1.0};
  CHECK(l(1.0) == doctest::Approx(2.0));
  CHECK(l(std::exp(2.0)) == doctest::Approx(6.0));
  // l(t x) / l(t) -> 1
  CHECK(l(1e12 * 7) / l(1e12) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("spectral inverse recovers measures on the direction grid") {
  const Matrix dirs = uniform_directions(2, 64);
  Vector w = Vector::Zero(64);
  w(5) = 1.0;
  w(40) = 0.5;
  const SpectralMeasure s(dirs, w);
  for (double beta : {0.7, 1.5, 2.4}) {
    const auto r = spectral_inverse(TailLimitFunction::from_spectral(s, beta, dirs), beta, 64);
    CHECK((r.S.weights - w).lpNorm<1>() / w.lpNorm<1>() < 0.05);
    CHECK((r.S.weights.array() >= 0).all());
    CHECK(r.residual < 1e-3);
  }
  // b = 0 except on one direction is not reachable by any non-negative S
  TailLimitFunction bad{dirs, Vector::Zero(64)};
  bad.values(0) = 1.0;
  CHECK_THROWS_AS(spectral_inverse(bad, 1.5, 64), Error);
}

TEST_CASE("integral exponents make the design nearly singular") {
  const Matrix dirs = uniform_directions(2, 64);
  const double c1 = condition_number(spectral_design(dirs, dirs, 1.0));
  const double c13 = condition_number(spectral_design(dirs, dirs, 1.3));
  CHECK(c1 / c13 > 10);
  // for beta = 1 the columns lie in span{(omega, theta)_+} whose odd parts are linear
  const Matrix a = spectral_design(dirs, dirs, 1.0);
  CHECK(a(0, 32) == doctest::Approx(1.0));
  CHECK(a(0, 0) == 0.0);
}

TEST_CASE("convergence criterion classification") {
  const Matrix dirs = uniform_directions(2, 64);
  const SpectralMeasure s = three_atoms();
  CHECK(check_cor2_conditions(TailLimitFunction::from_spectral(s, 1.5, dirs), 1.5).condition == Cor2Condition::nonintegral);
  // atoms in the closed positive quadrant: b vanishes on directions pointing into it
  CHECK(check_cor2_conditions(TailLimitFunction::from_spectral(s, 2.0, dirs), 2.0).condition ==
        Cor2Condition::vanishes_on_open_set);
  const auto uni = check_cor2_conditions(TailLimitFunction::from_spectral(SpectralMeasure::uniform(2, 64), 2.0, dirs), 2.0);
  CHECK(uni.condition == Cor2Condition::neither);
  CHECK_FALSE(uni.warning.empty());
}

TEST_CASE("Kesten chain tail index matches the moment equation") {
  // positive root of 0.3 2^b + 0.7 2^-b = 1 by bisection: 2^b = 7/3, so b = log2(7/3)
  double lo = 0.1, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.3 * std::pow(2.0, mid) + 0.7 * std::pow(0.5, mid) < 1.0 ? lo : hi) = mid;
  }
  CHECK(lo == doctest::Approx(std::log2(7.0 / 3.0)).epsilon(1e-12));
  const SampleSet xs = kesten_simulate(kesten_scalar_example(200000), 1);
  CHECK(xs.size() == 200000);
  CHECK((xs.samples.array() > 0).all());
  const TailIndex t = tail_index_estimate(xs);
  CHECK(std::abs(t.beta_hat - lo) / lo < 0.25);
  const SampleSet again = kesten_simulate(kesten_scalar_example(200000), 1);
  CHECK(again.samples == xs.samples);
}

TEST_CASE("expanding Kesten chains are reported as divergent") {
  KestenParams kp = kesten_scalar_example(1000);
  kp.m_values = {Matrix::Constant(1, 1, 3.0)};
  kp.m_probs = {1.0};
  try {
    kesten_simulate(kp, 1);
    FAIL("expected Divergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Divergence);
  }
}

TEST_CASE("normalized block sums") {
  const SampleSet raw = pareto_samples(2, 0.8, 10000, 4);
  const SampleSet sums = stable_sum_demo(raw, 0.8, 100);
  REQUIRE(sums.size() == 100);
  const Vector first = raw.samples.leftCols(100).rowwise().sum() * std::pow(100.0, -1.0 / 0.8);
  CHECK((sums.samples.col(0) - first).norm() < 1e-12 * first.norm());
  const SampleSet centred = stable_sum_demo(pareto_samples(2, 1.5, 10000, 4), 1.5, 100);
  CHECK(centred.samples.rowwise().mean().norm() < 1e-9 * centred.samples.cwiseAbs().maxCoeff());
  CHECK_THROWS_AS(stable_sum_demo(raw, 2.5, 100), Error);
}

}  // TEST_SUITE
