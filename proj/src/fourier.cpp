#include "exradon/fourier.hpp"

#include "exradon/quadrature.hpp"
#include "exradon/sphere.hpp"

namespace exradon {

namespace {

Complex expi(double phase) { return {std::cos(phase), -std::sin(phase)}; }

Complex analytic_fourier(const AnalyticDensity& f, const Eigen::Ref<const Vector>& xi, const QuadratureSettings& q) {
  require(f.formula != Formula::halfspace_3d && !f.homogeneity_degree() && f.formula != Formula::proposition_g,
          ErrorCode::InfiniteMass, "Fourier transform needs a finite measure");
  const int d = f.dim;
  const EffectiveBall ball = effective_ball(f);
  const double R = ball.radius;
  const double k = xi.norm();
  // radial panels resolve both the density scale and the oscillation
  double scale = R / 8.0;
  if (f.formula == Formula::derivative_blowup) scale = R / 4.0;
  const double width = std::min(scale, k > 0.0 ? 1.0 / k : scale);
  const int panels = std::max(q.radial_panels, static_cast<int>(std::ceil(R / width)));
  if (d == 1) {
    const Rule1D rule = composite_gauss(ball.center(0) - R, ball.center(0) + R, 2 * panels, q.order);
    Complex acc = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      Vector x(1);
      x(0) = rule.nodes[i];
      acc += rule.weights[i] * f(x) * expi(x(0) * xi(0));
    }
    return acc;
  }
  const Rule1D radial = composite_gauss(0.0, R, panels, q.order);
  const int n_ang = std::max(q.angular_nodes, static_cast<int>(std::ceil(4.0 * k * R)) + 16);
  const SphereRule ang = sphere_rule(d, d == 3 ? std::max(16, n_ang / 4) : n_ang);
  Complex acc = 0.0;
  for (Eigen::Index j = 0; j < ang.size(); ++j) {
    const Vector theta = ang.nodes.col(j);
    Complex ray = 0.0;
    for (std::size_t i = 0; i < radial.size(); ++i) {
      const double r = radial.nodes[i];
      const Vector x = ball.center + r * theta;
      const double v = f(x);
      if (v == 0.0) continue;
      ray += radial.weights[i] * std::pow(r, d - 1) * v * expi(x.dot(xi));
    }
    acc += ang.weights(j) * ray;
  }
  return acc;
}

}  // namespace

Complex fourier_measure(const MeasureModel& m, const Eigen::Ref<const Vector>& xi, const QuadratureSettings& q) {
  require(dim(m) == xi.size(), ErrorCode::BadParams, "frequency dimension does not match the measure");
  if (const auto* a = std::get_if<AtomicMeasure>(&m)) {
    Complex acc = 0.0;
    for (Eigen::Index j = 0; j < a->size(); ++j) acc += a->weights(j) * expi(a->points.col(j).dot(xi));
    return acc;
  }
  if (const auto* g = std::get_if<GridDensity>(&m)) {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      const double v = g->samples()[i];
      if (v != 0.0) acc += g->weight(i) * v * expi(g->node(i).dot(xi));
    }
    return acc;
  }
  if (std::holds_alternative<PolarHomogeneous>(m))
    throw Error(ErrorCode::InfiniteMass, "Fourier transform of a homogeneous measure is not a finite-measure transform");
  return analytic_fourier(std::get<AnalyticDensity>(m), xi, q);
}

Complex fourier_pushforward(const Pushforward& pf, double sigma) {
  return pf.integrate([&](double p) { return expi(sigma * p); });
}

SliceReport slice_residual(const MeasureModel& m, const Direction& omega, const std::vector<double>& sigmas,
                           const RadonSettings& s, const QuadratureSettings& q) {
  const Pushforward pf = radon_pushforward(m, omega, s);
  SliceReport rep;
  rep.rows.resize(sigmas.size());
  parallel_for(sigmas.size(), s.threads, [&](std::size_t i) {
    SliceRow row;
    row.sigma = sigmas[i];
    row.slice = fourier_pushforward(pf, sigmas[i]);
    row.direct = fourier_measure(m, Vector(sigmas[i] * omega.vec()), q);
    row.abs_diff = std::abs(row.slice - row.direct);
    rep.rows[i] = row;
  });
  for (const auto& r : rep.rows) rep.max_abs_diff = std::max(rep.max_abs_diff, r.abs_diff);
  return rep;
}

}  // namespace exradon
