#include "exradon/homog.hpp"

#include "exradon/quadrature.hpp"
#include "exradon/sphere.hpp"

#include <algorithm>

namespace exradon {

namespace {

HalflinePower make_power(double gamma, int dim, double e) {
  HalflinePower hp;
  hp.gamma = gamma;
  hp.dim = dim;
  hp.exponent = e;
  // least k with k + e > -1
  hp.k = std::max(0, static_cast<int>(std::floor(-e - 1.0)) + 1);
  if (hp.k + e <= -1.0) ++hp.k;
  if (hp.k > 0 && is_integer(e, 1e-12)) {
    // d^k/dx^k [c log x] = c (-1)^{k-1} (k-1)! x^{-k}
    hp.logarithmic = true;
    double fact = 1.0;
    for (int j = 2; j < hp.k; ++j) fact *= j;
    hp.c = ((hp.k - 1) % 2 == 0 ? 1.0 : -1.0) / fact;
    return hp;
  }
  double prod = 1.0;
  for (int j = 1; j <= hp.k; ++j) prod *= e + j;
  hp.c = 1.0 / prod;
  return hp;
}

}  // namespace

HalflinePower HalflinePower::halfline(double gamma) { return make_power(gamma, 1, gamma); }

HalflinePower HalflinePower::polar(double gamma, int d) {
  require(d >= 1, ErrorCode::BadParams, "dimension must be positive");
  return make_power(gamma, d, gamma + d - 1.0);
}

double HalflinePower::primitive(double x) const {
  if (x <= 0.0) return 0.0;
  if (logarithmic) return c * std::log(x);
  return c * std::pow(x, k + exponent);
}

double halfline_pairing(const HalflinePower& hp, const Jet1D& phi, double a, double b,
                        const std::vector<double>& poly) {
  require(hp.k <= 3, ErrorCode::DerivativeOrderUnsupported,
          "extension needs " + std::to_string(hp.k) + " derivatives, at most 3 are supported");
  a = std::max(a, 0.0);
  if (!(b > a)) return 0.0;
  const double width = b - a;
  // the primitive is singular (integrably) only at 0
  // phi^{(k)} is steep near the support edges, so the panels are fine
  const int levels = 80;
  const Rule1D rule = a == 0.0 ? graded_toward_left(0.0, b, width / 64.0, levels, 16)
                               : composite_gauss(a, b, 64, 16);
  const double sign = hp.k % 2 == 0 ? 1.0 : -1.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double x = rule.nodes[i];
    double F = hp.primitive(x);
    double xp = 1.0;
    for (double a_j : poly) {
      F += a_j * xp;
      xp *= x;
    }
    acc += rule.weights[i] * F * phi(x)[hp.k];
  }
  if (a == 0.0) {
    // [0, eps] below the finest graded panel, with phi^{(k)} frozen at 0
    const double eps = std::min(width / 64.0, b) * std::ldexp(1.0, -levels);
    double tail = hp.logarithmic ? hp.c * eps * (std::log(eps) - 1.0)
                                 : hp.c * std::pow(eps, hp.k + hp.exponent + 1.0) / (hp.k + hp.exponent + 1.0);
    double ep = eps;
    for (std::size_t j = 0; j < poly.size(); ++j, ep *= eps) tail += poly[j] * ep / static_cast<double>(j + 1);
    acc += tail * phi(0.0)[hp.k];
  }
  return sign * acc;
}

double extend_halfline(double gamma, const BumpFunction& phi) {
  require(phi.dim() == 1, ErrorCode::BadParams, "half-line extension needs a bump on R");
  const double c = phi.center()(0), R = phi.radius();
  return halfline_pairing(HalflinePower::halfline(gamma), [&](double x) { return phi.derivatives(x); }, c - R,
                          c + R);
}

double homogeneity_defect(double gamma, const BumpFunction& phi, double lambda) {
  require(lambda > 0.0, ErrorCode::BadParams, "scale factor must be positive");
  if (lambda == 1.0) return 0.0;
  return std::abs(extend_halfline(gamma, phi.scaled(lambda)) - std::pow(lambda, gamma + 1.0) * extend_halfline(gamma, phi));
}

double extend_polar(const AngularPart& u, double gamma, const BumpFunction& phi, const QuadratureSettings& q) {
  const int d = phi.dim();
  require(d >= 2, ErrorCode::BadParams, "polar extension needs d >= 2");
  require(!(is_integer(gamma + d, 1e-12) && gamma + d <= 0.0), ErrorCode::IntegralDegree,
          "gamma + d is a non-positive integer; use moment_condition");
  const HalflinePower hp = HalflinePower::polar(gamma, d);
  auto ray = [&](const Vector& theta) {
    const Vector zero = Vector::Zero(d);
    const double t = theta.dot(phi.center());
    const double disc = t * t - phi.center().squaredNorm() + phi.outer_radius() * phi.outer_radius();
    if (disc <= 0.0) return 0.0;
    const double s = std::sqrt(disc);
    return halfline_pairing(hp, [&](double r) { return phi.derivatives_along(zero, theta, r); }, t - s, t + s);
  };
  if (const auto* sm = std::get_if<SpectralMeasure>(&u)) {
    require(sm->dim() == d, ErrorCode::BadParams, "spectral measure dimension mismatch");
    const double beta = -gamma - d;
    double acc = 0.0;
    for (Eigen::Index j = 0; j < sm->size(); ++j) acc += sm->weights(j) * ray(sm->atoms.col(j));
    return beta * acc;
  }
  const auto& ad = std::get<AngularDensity>(u);
  require(ad.dim == d, ErrorCode::BadParams, "angular density dimension mismatch");
  const int n = d == 3 ? std::max(16, q.angular_nodes / 2) : 2 * q.angular_nodes;
  const double cnorm = phi.center().norm();
  const SphereRule rule = !phi.is_shell() && cnorm > phi.radius() * (1.0 + 1e-12)
                              ? cap_rule(phi.center() / cnorm, std::asin(phi.radius() / cnorm), n)
                              : sphere_rule(d, n);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < rule.size(); ++j) {
    const Vector theta = rule.nodes.col(j);
    const double w = ad(theta);
    if (w != 0.0) acc += rule.weights(j) * w * ray(theta);
  }
  return acc;
}

std::vector<std::vector<int>> multi_indices(int d, int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(d, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == d - 1) {
      idx[pos] = left;
      out.push_back(idx);
      return;
    }
    for (int v = left; v >= 0; --v) {
      idx[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, m);
  return out;
}

double MomentSet::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

MomentSet moment_condition(const std::function<double(const Vector&)>& u, int d, int m, int n) {
  require(m >= 0, ErrorCode::BadParams, "moment order must be non-negative");
  require(d >= 2 && d <= 3, ErrorCode::BadParams, "moments are computed for d = 2 or 3");
  MomentSet out;
  out.indices = multi_indices(d, m);
  out.values.assign(out.indices.size(), 0.0);
  const SphereRule rule = sphere_rule(d, n);
  for (Eigen::Index j = 0; j < rule.size(); ++j) {
    const Vector w = rule.nodes.col(j);
    const double uw = rule.weights(j) * u(w);
    for (std::size_t a = 0; a < out.indices.size(); ++a) {
      double mono = 1.0;
      for (int i = 0; i < d; ++i) mono *= std::pow(w(i), out.indices[a][i]);
      out.values[a] += uw * mono;
    }
  }
  return out;
}

MomentSet moment_condition(const AngularPart& u, int m, int n) {
  if (const auto* sm = std::get_if<SpectralMeasure>(&u)) {
    MomentSet out;
    out.indices = multi_indices(sm->dim(), m);
    out.values.assign(out.indices.size(), 0.0);
    for (Eigen::Index j = 0; j < sm->size(); ++j)
      for (std::size_t a = 0; a < out.indices.size(); ++a) {
        double mono = sm->weights(j);
        for (int i = 0; i < sm->dim(); ++i) mono *= std::pow(sm->atoms(i, j), out.indices[a][i]);
        out.values[a] += mono;
      }
    return out;
  }
  const auto& ad = std::get<AngularDensity>(u);
  return moment_condition([&](const Vector& w) { return ad(w); }, ad.dim, m, n);
}

}  // namespace exradon
