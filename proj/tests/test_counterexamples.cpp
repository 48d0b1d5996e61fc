#include <doctest.h>

#include "exradon/counterexamples.hpp"
#include "exradon/quadrature.hpp"

using namespace exradon;

TEST_SUITE("counterexamples") {

TEST_CASE("invisible densities have vanishing integrals on lines missing the origin") {
  const auto lines = random_hyperplanes(2, 100, 0.5, 5.0, 17);
  for (const auto& l : lines) CHECK((std::abs(l.p) >= 0.5 && std::abs(l.p) <= 5.0));
  InvisibleParams dt;
  dt.beta = {1, 0};
  for (const auto& f : {make_invisible(InvisibleKind::inverse_zk), make_invisible(InvisibleKind::meanzero_homog),
                        make_invisible(InvisibleKind::derivative_trick, dt)}) {
    const LineCertificate c = certify_invisible(f, lines, 0.5);
    CHECK(c.max_relative < 1e-6);
    CHECK(c.max_abs < 1e-6);
    CHECK(c.max_tail_ratio < 1e-6);
  }
  InvisibleParams cube;
  cube.k = 3;
  cube.imaginary = true;
  CHECK(certify_invisible(make_invisible(InvisibleKind::inverse_zk, cube), lines, 0.5).max_relative < 1e-6);
}

TEST_CASE("a Gaussian is a visible control") {
  const std::vector<Hyperplane> l{{Direction::from_angle(1.0), 0.5}};
  const LineCertificate c = certify_invisible(AnalyticDensity::gaussian(2), l, 0.5);
  CHECK(c.values[0] == doctest::Approx(std::exp(-0.125) / std::sqrt(2 * pi)).epsilon(1e-10));
  CHECK(c.max_abs > 0.1);
}

TEST_CASE("lines too close to the singularity are refused") {
  const std::vector<Hyperplane> l{{Direction::from_angle(1.0), 0.05}};
  CHECK_THROWS_AS(certify_invisible(make_invisible(InvisibleKind::inverse_zk), l, 0.1), Error);
}

TEST_CASE("invalid invisible parameters are rejected") {
  InvisibleParams k1;
  k1.k = 1;
  CHECK_THROWS_AS(make_invisible(InvisibleKind::inverse_zk, k1), Error);
  InvisibleParams odd;
  odd.n = 3;
  CHECK_THROWS_AS(make_invisible(InvisibleKind::meanzero_homog, odd), Error);
  InvisibleParams deep;
  deep.beta = {2, 1};
  CHECK_THROWS_AS(make_invisible(InvisibleKind::derivative_trick, deep), Error);
  CHECK(invisible_kind_from_string("inverse_zk") == InvisibleKind::inverse_zk);
  CHECK_THROWS_AS(invisible_kind_from_string("nope"), Error);
}

TEST_CASE("the three-dimensional trace measure is halfspace invisible") {
  const auto hs = random_halfspaces(3, 50, -3.0, -0.5, 23);
  for (const auto& h : hs) CHECK((h.p >= -3.0 && h.p <= -0.5));
  CHECK(certify_halfspace_invisible_3d(hs) < 1e-5);
  CHECK(certify_halfspace_invisible_3d(hs, true) > 0.1);
}

TEST_CASE("Euler identity for the radial divergence") {
  Vector x(2);
  x << 0.8, -0.4;
  // homogeneous of degree -2 in the plane: div(f x) = (d + degree) f = 0
  CHECK(std::abs(radial_field_divergence(make_invisible(InvisibleKind::inverse_zk), x)) < 1e-12);
  const auto g = AnalyticDensity::gaussian(2);
  CHECK(radial_field_divergence(g, x) == doctest::Approx((2.0 - x.squaredNorm()) * g(x)).epsilon(1e-12));
}

TEST_CASE("the oscillating density") {
  for (int m : {1, 2}) {
    const PropositionG g = PropositionG::make(m);
    double fact = 1.0;
    for (int j = 2; j <= m + 1; ++j) fact *= j;
    CHECK(g.C == doctest::Approx(2 * fact).epsilon(1e-6));
    // g stays non-negative and equals C |x|^{-m-2} where q vanishes
    for (double r : {1.5, 2.0, 3.0, 50.0, 1e4})
      for (int a = 0; a < 64; ++a) {
        Vector x(2);
        x << r * std::cos(0.1 * a), r * std::sin(0.1 * a);
        CHECK(g.g(x) >= -1e-14 * std::pow(r, -m - 2.0));
        if (r < std::exp(1.0)) CHECK(g.g(x) == doctest::Approx(g.C * std::pow(r, -m - 2.0)));
      }
    Vector inside(2);
    inside << 0.3, 0.2;
    CHECK(g.g(inside) == 0.0);
  }
  const PropositionG g = PropositionG::make(1);
  CHECK(g.q_from_log(std::log(10.0)) == doctest::Approx(2 * std::sin(std::log(std::log(10.0)))));
  CHECK(g.q_gradient_times_radius(1e6) == doctest::Approx(2 * std::abs(std::cos(std::log(std::log(1e6)))) / std::log(1e6)));
  CHECK(std::log(log_t_for_phase(pi / 2, 1)) == doctest::Approx(pi / 2 + 2 * pi));
}

TEST_CASE("scaled halfspace values match direct halfspace masses") {
  const PropositionG g = PropositionG::make(1);
  ScanRequest r;
  r.halfspace = Halfspace{Direction::from_angle(0.4), -1.0};
  const double t = 50.0;
  const auto pts = scan_limits(g, r, {std::log(t)});
  // t^{m+2} int_H g(t x) dx = t^m g(t H)
  const double direct = t * halfspace_mass(g.density(), Halfspace{Direction::from_angle(0.4), -t});
  CHECK(pts[0].value == doctest::Approx(direct).epsilon(1e-6));
  CHECK_THROWS_AS(scan_limits(g, r, {0.5}), Error);
  try {
    scan_limits(g, r, {kInf});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TOverflow);
  }
}

TEST_CASE("halfspace values settle slowly while test-function values oscillate") {
  const PropositionG g = PropositionG::make(1);
  ScanRequest r;
  r.halfspace = Halfspace{Direction::from_angle(0.4), -1.0};
  std::vector<double> lt;
  for (int dcd = 3; dcd <= 9; ++dcd) lt.push_back(dcd * std::log(10.0));
  const auto hv = scan_limits(g, r, lt);
  // successive-decade differences beyond the peak shrink
  for (std::size_t i = 4; i + 1 < hv.size(); ++i)
    CHECK(std::abs(hv[i + 1].value - hv[i].value) <= std::abs(hv[i].value - hv[i - 1].value) + 1e-12);
  CHECK(std::abs(hv.back().value - hv.back().baseline) < 0.05);

  Vector c(2);
  c << 2 * std::cos(pi / 3), 2 * std::sin(pi / 3);
  const BumpFunction phi(c, 0.5);
  const Rule1D rx = composite_gauss(c(0) - 0.5, c(0) + 0.5, 16, 16), ry = composite_gauss(c(1) - 0.5, c(1) + 0.5, 16, 16);
  double hpair = 0.0;
  Vector y(2);
  for (std::size_t i = 0; i < rx.size(); ++i)
    for (std::size_t j = 0; j < ry.size(); ++j) {
      y << rx.nodes[i], ry.nodes[j];
      hpair += rx.weights[i] * ry.weights[j] * g.h(y) * phi(y);
    }
  ScanRequest tr;
  tr.mode = ScanMode::testfn;
  tr.phi = phi;
  const auto tv = scan_limits(g, tr, {log_t_for_phase(pi / 2), log_t_for_phase(3 * pi / 2)});
  const double up = tv[0].value - tv[0].baseline, down = tv[1].value - tv[1].baseline;
  CHECK(up > std::abs(hpair));
  CHECK(down < -std::abs(hpair));
}

}  // TEST_SUITE
