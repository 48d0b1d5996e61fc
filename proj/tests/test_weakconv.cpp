#include <doctest.h>

#include "exradon/regvar.hpp"
#include "exradon/weakconv.hpp"

using namespace exradon;

TEST_SUITE("weakconv") {

TEST_CASE("sequence classification") {
  std::vector<double> conv, osc, div;
  for (int k = 1; k <= 10; ++k) {
    conv.push_back(2.0 + std::pow(0.5, 2.0 * k));
    osc.push_back(k % 2 == 0 ? 1.0 : -1.0);
    div.push_back(k * k);
  }
  double lim = 0.0;
  CHECK(classify_sequence(conv, 1e-3, 1e-12, &lim) == LimitFlag::converged);
  CHECK(lim == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(classify_sequence(osc, 1e-3, 1e-12) == LimitFlag::oscillating);
  CHECK(classify_sequence(div, 1e-3, 1e-12) == LimitFlag::divergent);
  CHECK(classify_sequence(std::vector<double>(6, 0.0), 1e-3, 1e-12) == LimitFlag::converged);
}

TEST_CASE("default grid") {
  const auto k = default_k_grid();
  REQUIRE(k.size() == 10);
  CHECK(k.front() == 2);
  CHECK(k.back() == 1024);
}

TEST_CASE("a shrinking atom converges to the Dirac mass at 0") {
  Vector a(2);
  a << 1.0, 0.0;
  const auto seq = MeasureSequence::shrinking_atom(a);
  const auto ht = halfspace_limit_table(seq, {Halfspace{Direction::axis(2, 0), 0.1}}, default_k_grid());
  CHECK(ht.all_converged());
  CHECK(ht.rows[0].limit == doctest::Approx(1.0));
  // before the atom enters the halfspace it is not counted
  CHECK(ht.rows[0].values[0] == 0.0);
  const auto tt = testfn_limit_table(seq, {BumpFunction(Vector::Zero(2), 1.0)}, default_k_grid(),
                                     MeasureModel(AtomicMeasure::dirac(Vector::Zero(2))));
  REQUIRE(tt.rows[0].residual);
  CHECK(*tt.rows[0].residual < 1e-3);
  CHECK_FALSE(ht.norm_bound_violated);
}

TEST_CASE("derivative blow-up: halfspace values vanish, pairings converge to -phi'(0)") {
  const auto seq = MeasureSequence::derivative_blowup();
  Vector one(1);
  one << 1.0;
  const std::vector<Halfspace> hs{{Direction(one), 0.3}, {Direction(Vector(-one)), -0.3}, {Direction(one), -0.2}};
  const auto ht = halfspace_limit_table(seq, hs, default_k_grid());
  for (const auto& r : ht.rows) {
    CHECK(r.flag == LimitFlag::converged);
    CHECK(std::abs(r.limit) < 1e-3);
  }
  CHECK(ht.norm_bound_violated);
  // total variation k * ||f'||_1 grows linearly
  CHECK(ht.norms.back() / ht.norms.front() == doctest::Approx(512.0).epsilon(1e-6));
  const BumpFunction phi = BumpFunction::on_line(0.3, 1.0);
  const double h = 1e-6;
  const double dphi0 = (phi(h) - phi(-h)) / (2 * h);
  const auto tt = testfn_limit_table(seq, {phi}, default_k_grid());
  CHECK(std::abs(tt.rows[0].limit + dphi0) < 1e-3);
}

TEST_CASE("scaled Pareto laws converge to the homogeneous limit") {
  Matrix a(2, 3);
  a << 1.0, std::sqrt(0.5), 0.0, 0.0, std::sqrt(0.5), 1.0;
  Vector w(3);
  w << 0.3, 0.4, 0.3;
  const SpectralMeasure s(a, w);
  const Halfspace h{Direction::from_angle(3.5), -1.0};
  double oracle = 0.0;
  for (int j = 0; j < 3; ++j) oracle += w(j) * std::pow(std::max(0.0, -h.omega.dot(a.col(j))), 2.0);
  const auto seq = MeasureSequence::scaled_pareto(s, 2.0);
  const auto ht = halfspace_limit_table(seq, {h}, default_k_grid());
  CHECK(ht.all_converged());
  CHECK(std::abs(ht.rows[0].limit - oracle) < 1e-3);
  // norms are measured outside the unit ball, where mu_k = mu once k >= 1
  CHECK(seq.norm_exclusion == 1.0);
  CHECK(ht.norms.back() == doctest::Approx(ht.norms.front()).epsilon(1e-9));
}

TEST_CASE("an escaping atom keeps its norm but loses its mass") {
  Vector a(2);
  a << 1.0, 0.0;
  const BumpFunction phi(Vector::Zero(2), 3.0);
  const NormReport r = norm_continuity_check(MeasureSequence::escaping_atom(a), AtomicMeasure(Matrix(2, 0), Vector(0)), phi,
                                             default_k_grid());
  CHECK(r.norm_condition_violated);
  CHECK_FALSE(r.bounded_converges);
  CHECK(r.c0_pairings.back() == 0.0);
  for (double b : r.bounded_pairings) CHECK(b == doctest::Approx(1.0));
  const NormReport ok = norm_continuity_check(MeasureSequence::shrinking_atom(a), AtomicMeasure::dirac(Vector::Zero(2)), phi,
                                              default_k_grid());
  CHECK(ok.norms_converge);
  CHECK(ok.bounded_converges);
}

TEST_CASE("the zero sequence and covering halfspaces") {
  const auto z = MeasureSequence::zero(2);
  const auto t = halfspace_limit_table(z, {Halfspace{Direction::axis(2, 1), -0.5}}, default_k_grid());
  CHECK(t.all_converged());
  CHECK(t.rows[0].limit == 0.0);
  Matrix pts(2, 2);
  pts << 0.0, 3.0, 0.0, 1.0;
  Vector w(2);
  w << 2.0, 1.0;
  // the atom at 0 lies in both halfspaces, the far one only in x_1 > -1
  CHECK(covering_halfspace_bound(AtomicMeasure(pts, w)) == doctest::Approx(5.0));
}

}  // TEST_SUITE
