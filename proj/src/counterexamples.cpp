#include "exradon/counterexamples.hpp"

#include "exradon/quadrature.hpp"
#include "exradon/random.hpp"
#include "exradon/sphere.hpp"

#include <algorithm>

namespace exradon {

const char* to_string(InvisibleKind k) {
  switch (k) {
    case InvisibleKind::inverse_zk: return "inverse_zk";
    case InvisibleKind::meanzero_homog: return "meanzero_homog";
    case InvisibleKind::derivative_trick: return "derivative_trick";
    case InvisibleKind::halfspace_supported_3d: return "halfspace_supported_3d";
  }
  return "?";
}

InvisibleKind invisible_kind_from_string(const std::string& s) {
  for (auto k : {InvisibleKind::inverse_zk, InvisibleKind::meanzero_homog, InvisibleKind::derivative_trick,
                 InvisibleKind::halfspace_supported_3d})
    if (s == to_string(k)) return k;
  throw Error(ErrorCode::BadParams, "unknown invisible kind '" + s + "'");
}

AnalyticDensity make_invisible(InvisibleKind kind, const InvisibleParams& p) {
  switch (kind) {
    case InvisibleKind::inverse_zk:
      require(p.k >= 2, ErrorCode::BadParams, "1/z^k is invisible only for k >= 2");
      return AnalyticDensity::inverse_zk(p.k, p.imaginary);
    case InvisibleKind::meanzero_homog:
      // an odd angular part has non-vanishing line integrals
      require(p.n >= 2 && p.n % 2 == 0, ErrorCode::BadParams, "angular order must be even and >= 2");
      if (p.dim == 2) return AnalyticDensity::meanzero_homog_2d(p.n, p.a, p.b);
      require(p.dim == 3, ErrorCode::BadParams, "meanzero_homog supports d = 2 or 3");
      return AnalyticDensity::meanzero_homog_3d(p.n, p.a);
    case InvisibleKind::derivative_trick: {
      const AnalyticDensity base = p.base ? *p.base : AnalyticDensity::inverse_zk(2);
      require(base.formula == Formula::inverse_zk || base.formula == Formula::meanzero_homog, ErrorCode::BadParams,
              "derivative_trick needs an invisible homogeneous base");
      std::vector<int> beta = p.beta.empty() ? std::vector<int>(base.dim, 0) : p.beta;
      if (p.beta.empty()) beta[0] = 1;
      return AnalyticDensity::derivative_trick(base, beta);
    }
    case InvisibleKind::halfspace_supported_3d:
      return AnalyticDensity::halfspace_3d();
  }
  throw Error(ErrorCode::BadParams, "unknown invisible kind");
}

std::vector<Hyperplane> random_hyperplanes(int d, std::size_t n, double p_min, double p_max, std::uint64_t seed) {
  require(0.0 <= p_min && p_min <= p_max, ErrorCode::BadParams, "need 0 <= p_min <= p_max");
  Philox rng(seed, 0);
  std::vector<Hyperplane> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector v(d);
    for (int k = 0; k < d; ++k) v(k) = rng.normal();
    const double mag = p_min + (p_max - p_min) * rng.uniform();
    out.push_back({Direction::normalized(v), rng.uniform() < 0.5 ? -mag : mag});
  }
  return out;
}

std::vector<Halfspace> random_halfspaces(int d, std::size_t n, double p_lo, double p_hi, std::uint64_t seed) {
  require(p_lo <= p_hi, ErrorCode::BadParams, "need p_lo <= p_hi");
  Philox rng(seed, 1);
  std::vector<Halfspace> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector v(d);
    for (int k = 0; k < d; ++k) v(k) = rng.normal();
    out.push_back({Direction::normalized(v), p_lo + (p_hi - p_lo) * rng.uniform()});
  }
  return out;
}

LineCertificate certify_invisible(const AnalyticDensity& f, const std::vector<Hyperplane>& lines, double p_min,
                                  const RadonSettings& s) {
  require(p_min > s.clearance, ErrorCode::BadParams, "p_min must exceed the singular clearance");
  const auto env = decay_envelope(f);
  LineCertificate out;
  out.values.resize(lines.size());
  out.scales.resize(lines.size());
  std::vector<double> tails(lines.size());
  parallel_for(lines.size(), s.threads, [&](std::size_t i) {
    require(std::abs(lines[i].p) >= p_min, ErrorCode::BadParams, "line is closer to the origin than p_min");
    const HyperplaneIntegral hi = hyperplane_integral(f, lines[i], s);
    out.values[i] = hi.value;
    out.scales[i] = env ? env->amplitude * std::pow(std::abs(lines[i].p), -env->decay) : 1.0;
    tails[i] = hi.tail_bound;
  });
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out.max_abs = std::max(out.max_abs, std::abs(out.values[i]));
    out.max_relative = std::max(out.max_relative, std::abs(out.values[i]) / out.scales[i]);
    out.max_tail_ratio = std::max(out.max_tail_ratio, tails[i] / out.scales[i]);
  }
  return out;
}

double certify_halfspace_invisible_3d(const std::vector<Halfspace>& halfspaces, bool absolute, int angular_nodes) {
  const AnalyticDensity f = AnalyticDensity::halfspace_3d();
  auto trace = [&](const Vector& x) { return absolute ? std::abs(f.trace(x)) : f.trace(x); };
  double worst = 0.0;
  for (const auto& h : halfspaces) worst = std::max(worst, std::abs(halfspace_trace_mass(trace, h, angular_nodes)));
  return worst;
}

double radial_field_divergence(const AnalyticDensity& f, const Vector& x) {
  const int d = f.dim;
  double div = d * f(x);
  for (int i = 0; i < d; ++i) {
    std::vector<int> e(d, 0);
    e[i] = 1;
    div += x(i) * AnalyticDensity::derivative_trick(f, e)(x);
  }
  return div;
}

PropositionG PropositionG::make(int m, bool oscillate) {
  require(m >= 1, ErrorCode::BadParams, "proposition order m must be >= 1");
  PropositionG g;
  g.m = m;
  g.oscillate = oscillate;
  double sup = 0.0;
  constexpr int n = 1 << 14;
  for (int j = 0; j < n; ++j) sup = std::max(sup, std::abs(g.h_unit(2.0 * pi * j / n)));
  g.C = 2.0 * sup;
  return g;
}

double PropositionG::h_unit(double angle) const {
  const double fact = std::tgamma(m + 2.0);
  return (m % 2 == 0 ? fact : -fact) * std::cos((m + 2) * angle);
}

double PropositionG::h(const Vector& x) const {
  const double r = x.norm();
  if (r <= 1.0) return 0.0;
  return h_unit(std::atan2(x(1), x(0))) * std::pow(r, -m - 2.0);
}

double PropositionG::q_from_log(double log_r) const {
  if (!oscillate) return 1.0;
  if (log_r <= 1.0) return 0.0;
  return 2.0 * std::sin(std::log(log_r));
}

double PropositionG::g(const Vector& x) const {
  const double r = x.norm();
  if (r <= 1.0) return 0.0;
  return q_from_log(std::log(r)) * h(x) + C * std::pow(r, -m - 2.0);
}

double PropositionG::q_gradient_times_radius(double r) const {
  if (!oscillate || r <= std::exp(1.0)) return 0.0;
  const double lr = std::log(r);
  return 2.0 * std::abs(std::cos(std::log(lr))) / lr;
}

double log_t_for_phase(double phase, int j) { return std::exp(phase + 2.0 * pi * j); }

namespace {

// int_{u >= max(0, -a)} weight(a + u) e^{-m u} du with weight = q (from log
// radius) or 1 (baseline), both vanishing where a + u <= 0.
std::pair<double, double> radial_log_integrals(const PropositionG& g, double a) {
  const double m = g.m;
  const double u0 = std::max(0.0, -a);
  const double base = std::exp(-m * u0) / m;
  const double u1 = g.oscillate ? std::max(u0, 1.0 - a) : u0;
  const double span = 60.0 / m;
  const Rule1D rule = composite_gauss(u1, u1 + span, 24, 16);
  const double osc = rule.integrate([&](double u) { return g.q_from_log(a + u) * std::exp(-m * u); });
  return {osc, base};
}

}  // namespace

std::vector<ScanPoint> scan_limits(const PropositionG& g, const ScanRequest& req, const std::vector<double>& log_t) {
  for (double lt : log_t)
    require(std::isfinite(lt) && lt > 1.0, ErrorCode::TOverflow, "log log t is undefined for t <= e");
  std::vector<ScanPoint> out;
  out.reserve(log_t.size());
  if (req.mode == ScanMode::halfspace) {
    require(req.halfspace.has_value(), ErrorCode::BadParams, "halfspace mode needs a halfspace");
    const Halfspace& H = *req.halfspace;
    require(H.omega.dim() == 2, ErrorCode::BadParams, "the proposition density lives in d = 2");
    require(H.p < 0.0, ErrorCode::HalfspaceTouchesOrigin, "halfspace must be bounded away from the origin");
    const SphereRule rule = cap_rule(Vector(-H.omega.vec()), pi / 2.0, req.angular_nodes);
    for (double lt : log_t) {
      double v = 0.0, b = 0.0;
      for (Eigen::Index j = 0; j < rule.size(); ++j) {
        const Vector theta = rule.nodes.col(j);
        const double a = theta.dot(H.omega.vec());
        if (a >= 0.0) continue;
        // r from R0 = p / a to infinity, r = R0 e^u
        const double R0 = H.p / a;
        const auto [osc, base] = radial_log_integrals(g, lt + std::log(R0));
        const double w = rule.weights(j) * std::pow(R0, -g.m);
        v += w * g.h_unit(std::atan2(theta(1), theta(0))) * osc;
        b += w * g.C * base;
      }
      out.push_back({lt, v + b, b});
    }
    return out;
  }
  require(req.phi.has_value(), ErrorCode::BadParams, "testfn mode needs a test function");
  const BumpFunction& phi = *req.phi;
  require(phi.dim() == 2 && !phi.is_shell(), ErrorCode::BadParams, "testfn mode needs a ball bump in d = 2");
  require(phi.distance_to_origin() > 0.0, ErrorCode::SupportTouchesSingularity,
          "test function support must avoid the origin");
  const Vector& c = phi.center();
  const double R = phi.radius();
  const Rule1D rx = composite_gauss(c(0) - R, c(0) + R, 12, 16);
  const Rule1D ry = composite_gauss(c(1) - R, c(1) + R, 12, 16);
  for (double lt : log_t) {
    double v = 0.0, b = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i)
      for (std::size_t j = 0; j < ry.size(); ++j) {
        const Vector x(Vector(Eigen::Vector2d(rx.nodes[i], ry.nodes[j])));
        const double w = rx.weights[i] * ry.weights[j] * phi(x);
        if (w == 0.0) continue;
        const double lr = std::log(x.norm());
        if (lt + lr <= 0.0) continue;  // t |x| <= 1, where g vanishes
        const double r_pow = std::exp((-g.m - 2.0) * lr);
        v += w * g.q_from_log(lt + lr) * g.h_unit(std::atan2(x(1), x(0))) * r_pow;
        b += w * g.C * r_pow;
      }
    out.push_back({lt, v + b, b});
  }
  return out;
}

}  // namespace exradon
