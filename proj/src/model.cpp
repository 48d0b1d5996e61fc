#include "exradon/model.hpp"

#include "exradon/quadrature.hpp"
#include "exradon/sphere.hpp"

#include <algorithm>
#include <functional>
#include <limits>

namespace exradon {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::SupportTouchesSingularity: return "SupportTouchesSingularity";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::HyperplaneHitsSingularity: return "HyperplaneHitsSingularity";
    case ErrorCode::OffsetOutOfRange: return "OffsetOutOfRange";
    case ErrorCode::HalfspaceTouchesOrigin: return "HalfspaceTouchesOrigin";
    case ErrorCode::InfiniteMass: return "InfiniteMass";
    case ErrorCode::DerivativeOrderUnsupported: return "DerivativeOrderUnsupported";
    case ErrorCode::IntegralDegree: return "IntegralDegree";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::TOverflow: return "TOverflow";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Directions and hyperplanes

Direction::Direction(Vector v) : v_(std::move(v)) {
  require(v_.size() >= 1 && v_.size() <= kMaxDim, ErrorCode::BadParams, "direction dimension must be 1..6");
  require(v_.allFinite() && std::abs(v_.norm() - 1.0) <= 1e-12, ErrorCode::BadParams,
          "direction must be a unit vector");
}

Direction Direction::normalized(const Vector& v) {
  const double n = v.norm();
  require(n > 0.0 && std::isfinite(n), ErrorCode::BadParams, "cannot normalize a zero vector");
  return Direction(Vector(v / n));
}

Direction Direction::from_angle(double theta) {
  Vector v(2);
  v << std::cos(theta), std::sin(theta);
  return normalized(v);
}

Direction Direction::axis(int d, int index) {
  require(index >= 0 && index < d, ErrorCode::BadParams, "axis index out of range");
  return Direction(Vector::Unit(d, index));
}

Hyperplane Hyperplane::canonical() const {
  for (int i = 0; i < omega.dim(); ++i) {
    if (omega(i) > 0.0) return *this;
    if (omega(i) < 0.0) return Hyperplane{-omega, -p};
  }
  return *this;
}

bool Hyperplane::same_as(const Hyperplane& other, double tol) const {
  if (omega.dim() != other.omega.dim()) return false;
  const Hyperplane a = canonical(), b = other.canonical();
  return (a.omega.vec() - b.omega.vec()).lpNorm<Eigen::Infinity>() <= tol && std::abs(a.p - b.p) <= tol;
}

// ---------------------------------------------------------------------------
// Grid densities

GridDensity::GridDensity(int dim, std::vector<int> shape, Vector origin, double spacing,
                         std::vector<double> samples)
    : dim_(dim), shape_(std::move(shape)), origin_(std::move(origin)), spacing_(spacing),
      samples_(std::move(samples)) {
  require(dim_ == 2 || dim_ == 3, ErrorCode::BadParams, "grids support d = 2 or d = 3");
  require(static_cast<int>(shape_.size()) == dim_ && origin_.size() == dim_, ErrorCode::BadParams,
          "grid shape/origin do not match the dimension");
  require(spacing_ > 0.0 && std::isfinite(spacing_), ErrorCode::BadParams, "grid spacing must be positive");
  std::size_t total = 1;
  for (int n : shape_) {
    require(n >= 1, ErrorCode::BadParams, "grid extents must be positive");
    total *= static_cast<std::size_t>(n);
  }
  require(total == samples_.size(), ErrorCode::BadParams, "grid sample count does not match the shape");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    require(std::isfinite(samples_[i]), ErrorCode::NonFinite, "grid samples must be finite");
    if (samples_[i] != 0.0) support_radius_ = std::max(support_radius_, node(i).norm());
  }
}

Vector GridDensity::node(std::size_t flat) const {
  Vector x(dim_);
  for (int k = dim_ - 1; k >= 0; --k) {
    x(k) = origin_(k) + spacing_ * static_cast<double>(flat % shape_[k]);
    flat /= shape_[k];
  }
  return x;
}

double GridDensity::weight(std::size_t flat) const {
  double w = 1.0;
  for (int k = dim_ - 1; k >= 0; --k) {
    const auto i = static_cast<int>(flat % shape_[k]);
    flat /= shape_[k];
    w *= (i == 0 || i == shape_[k] - 1) && shape_[k] > 1 ? 0.5 * spacing_ : spacing_;
  }
  return w;
}

double GridDensity::interpolate(const Eigen::Ref<const Vector>& x) const {
  std::array<int, 3> base{};
  std::array<double, 3> frac{};
  for (int k = 0; k < dim_; ++k) {
    const double u = (x(k) - origin_(k)) / spacing_;
    if (!(u >= 0.0) || u > shape_[k] - 1) return 0.0;
    int i = static_cast<int>(std::floor(u));
    if (i >= shape_[k] - 1) i = shape_[k] - 2;
    base[k] = std::max(i, 0);
    frac[k] = u - base[k];
  }
  double acc = 0.0;
  const int corners = 1 << dim_;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t flat = 0;
    for (int k = 0; k < dim_; ++k) {
      const int bit = (c >> k) & 1;
      w *= bit ? frac[k] : 1.0 - frac[k];
      flat = flat * shape_[k] + static_cast<std::size_t>(base[k] + bit);
    }
    if (w != 0.0) acc += w * samples_[flat];
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Atomic, spectral, angular

AtomicMeasure::AtomicMeasure(Matrix pts, Vector w) : points(std::move(pts)), weights(std::move(w)) {
  require(points.cols() == weights.size(), ErrorCode::BadParams, "atom and weight counts differ");
  require(points.rows() >= 1 && points.rows() <= kMaxDim, ErrorCode::BadParams, "atomic dimension must be 1..6");
  require(points.allFinite() && weights.allFinite(), ErrorCode::NonFinite, "atoms must be finite");
}

AtomicMeasure AtomicMeasure::dirac(const Vector& a, double weight) {
  Matrix p = a;
  Vector w(1);
  w(0) = weight;
  return AtomicMeasure(std::move(p), std::move(w));
}

SpectralMeasure::SpectralMeasure(Matrix a, Vector w) : atoms(std::move(a)), weights(std::move(w)) {
  require(atoms.cols() == weights.size(), ErrorCode::BadParams, "atom and weight counts differ");
  for (Eigen::Index j = 0; j < atoms.cols(); ++j)
    require(std::abs(atoms.col(j).norm() - 1.0) <= 1e-12, ErrorCode::BadParams, "spectral atoms must be unit vectors");
  require((weights.array() >= 0.0).all() && weights.allFinite(), ErrorCode::BadParams,
          "spectral weights must be finite and non-negative");
}

SpectralMeasure SpectralMeasure::uniform(int d, int n, double total_mass) {
  const Matrix dirs = uniform_directions(d, n);
  return SpectralMeasure(dirs, Vector::Constant(dirs.cols(), total_mass / dirs.cols()));
}

AngularDensity AngularDensity::constant(int d, double c) {
  AngularDensity u;
  u.dim = d;
  u.c0 = c;
  return u;
}

AngularDensity AngularDensity::harmonic(int n, double a, double b, double c0) {
  AngularDensity u;
  u.kind = Kind::harmonic;
  u.dim = 2;
  u.order = n;
  u.c0 = c0;
  u.a = a;
  u.b = b;
  return u;
}

AngularDensity AngularDensity::zonal(int n, double a, double c0) {
  AngularDensity u;
  u.kind = Kind::zonal;
  u.dim = 3;
  u.order = n;
  u.c0 = c0;
  u.a = a;
  return u;
}

double AngularDensity::operator()(const Eigen::Ref<const Vector>& omega) const {
  switch (kind) {
    case Kind::constant:
      return c0;
    case Kind::harmonic: {
      const double t = std::atan2(omega(1), omega(0));
      return c0 + a * std::cos(order * t) + b * std::sin(order * t);
    }
    case Kind::zonal:
      return c0 + a * std::legendre(static_cast<unsigned>(order), std::clamp(omega(2), -1.0, 1.0));
  }
  return 0.0;
}

double AngularDensity::sup_abs() const {
  switch (kind) {
    case Kind::constant: return std::abs(c0);
    case Kind::harmonic: return std::abs(c0) + std::hypot(a, b);
    case Kind::zonal: return std::abs(c0) + std::abs(a);
  }
  return 0.0;
}

int dim(const MeasureModel& m) {
  return std::visit(
      [](const auto& x) -> int {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, GridDensity>) return x.dim();
        else if constexpr (std::is_same_v<T, AtomicMeasure>) return x.dim();
        else return x.dim;
      },
      m);
}

// ---------------------------------------------------------------------------
// Polar quadrature around the origin

namespace {

using Interval = std::pair<double, double>;

// {r >= rmin : r theta in supp b}
std::vector<Interval> ray_support(const BumpFunction& b, const Vector& theta, double rmin) {
  std::vector<Interval> out;
  auto ball = [&](double R, double& lo, double& hi) {
    const double t = theta.dot(b.center());
    const double disc = t * t - b.center().squaredNorm() + R * R;
    if (disc <= 0.0) return false;
    const double s = std::sqrt(disc);
    lo = t - s;
    hi = t + s;
    return hi > lo;
  };
  double lo, hi;
  if (!ball(b.outer_radius(), lo, hi)) return out;
  std::vector<Interval> pieces{{lo, hi}};
  double ilo, ihi;
  if (b.is_shell() && b.shell_radius() > b.radius() && ball(b.shell_radius() - b.radius(), ilo, ihi))
    pieces = {{lo, ilo}, {ihi, hi}};
  for (auto [a, c] : pieces) {
    a = std::max(a, rmin);
    if (c > a) out.emplace_back(a, c);
  }
  return out;
}

int angular_count(int d, const QuadratureSettings& q) { return d == 3 ? std::max(8, q.angular_nodes / 4) : q.angular_nodes; }

SphereRule angular_rule_for(const BumpFunction& b, const QuadratureSettings& q) {
  const int d = b.dim();
  const double c = b.center().norm();
  if (d >= 2 && !b.is_shell() && c > b.radius() * (1.0 + 1e-12))
    return cap_rule(b.center() / c, std::asin(b.radius() / c), angular_count(d, q));
  return sphere_rule(d, angular_count(d, q));
}

// Integrates density(theta, r) * phi(r theta) * r^{d-1} over the support of
// the ball/shell bump b in polar coordinates, restricted to r in [rmin, rmax].
// `breaks` lists radii (per direction) where the density is not smooth.
double polar_pairing(const BumpFunction& b, const QuadratureSettings& q, double rmin, double rmax,
                     const std::function<double(const Vector&, double)>& density,
                     const std::function<std::vector<double>(const Vector&)>& breaks = {}) {
  const int d = b.dim();
  const SphereRule ang = angular_rule_for(b, q);
  double total = 0.0;
  for (Eigen::Index j = 0; j < ang.size(); ++j) {
    const Vector theta = ang.nodes.col(j);
    double acc = 0.0;
    for (auto [lo, hi] : ray_support(b, theta, rmin)) {
      hi = std::min(hi, rmax);
      if (!(hi > lo)) continue;
      std::vector<double> cuts{lo};
      if (breaks)
        for (double t : breaks(theta))
          if (t > lo && t < hi) cuts.push_back(t);
      cuts.push_back(hi);
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const Rule1D rule = composite_gauss(cuts[k], cuts[k + 1], q.radial_panels, q.order);
        for (std::size_t i = 0; i < rule.size(); ++i) {
          const double r = rule.nodes[i];
          const Vector x = r * theta;
          const double phi = b(x);
          if (phi == 0.0) continue;
          acc += rule.weights[i] * std::pow(r, d - 1) * density(theta, r) * phi;
        }
      }
    }
    total += ang.weights(j) * acc;
  }
  return total;
}

double polar_pairing_1d_density(const AnalyticDensity& f, const BumpFunction& b, const QuadratureSettings& q) {
  // For densities with support ball B(s, rho): intersect rays with it as well.
  const double rho = f.support_radius();
  const Vector s = f.support_center();
  auto breaks = [&](const Vector& theta) {
    std::vector<double> out = f.line_breakpoints(Vector::Zero(f.dim), theta);
    if (std::isfinite(rho)) {
      const double t = theta.dot(s);
      const double disc = t * t - s.squaredNorm() + rho * rho;
      if (disc > 0.0) {
        out.push_back(t - std::sqrt(disc));
        out.push_back(t + std::sqrt(disc));
      }
    }
    return out;
  };
  const double rmax = std::isfinite(rho) ? s.norm() + rho : std::numeric_limits<double>::infinity();
  return polar_pairing(b, q, 0.0, rmax,
                       [&](const Vector& theta, double r) { return f(Vector(r * theta)); }, breaks);
}

double pair_bump(const GridDensity& g, const BumpFunction& b, const QuadratureSettings&) {
  require(b.dim() == g.dim(), ErrorCode::BadParams, "test function dimension mismatch");
  double acc = 0.0;
  const double reach = b.center().norm() + b.outer_radius();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.samples()[i] == 0.0) continue;
    const Vector x = g.node(i);
    if (x.norm() > reach) continue;
    acc += g.weight(i) * g.samples()[i] * b(x);
  }
  return acc;
}

double pair_bump(const AtomicMeasure& m, const BumpFunction& b, const QuadratureSettings&) {
  require(b.dim() == m.dim(), ErrorCode::BadParams, "test function dimension mismatch");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < m.size(); ++j) acc += m.weights(j) * b(Vector(m.points.col(j)));
  return acc;
}

double pair_bump(const PolarHomogeneous& m, const BumpFunction& b, const QuadratureSettings& q) {
  require(b.dim() == m.dim, ErrorCode::BadParams, "test function dimension mismatch");
  if (m.inner_cutoff <= 0.0)
    require(b.distance_to_origin() > 0.0, ErrorCode::SupportTouchesSingularity,
            "test function support must avoid the origin");
  const double eps = std::max(0.0, m.inner_cutoff);
  if (const auto* s = std::get_if<SpectralMeasure>(&m.angular)) {
    const double beta = m.beta();
    double total = 0.0;
    for (Eigen::Index j = 0; j < s->size(); ++j) {
      if (s->weights(j) == 0.0) continue;
      const Vector theta = s->atoms.col(j);
      double acc = 0.0;
      for (auto [lo, hi] : ray_support(b, theta, eps)) {
        const Rule1D rule = composite_gauss(lo, hi, q.radial_panels, q.order);
        acc += rule.integrate([&](double r) { return beta * std::pow(r, -beta - 1.0) * b(Vector(r * theta)); });
      }
      total += s->weights(j) * acc;
    }
    return total;
  }
  const auto& u = std::get<AngularDensity>(m.angular);
  const double alpha = m.degree;
  return polar_pairing(b, q, eps, std::numeric_limits<double>::infinity(),
                       [&](const Vector& theta, double r) { return std::pow(r, alpha) * u(theta); });
}

double pair_bump(const AnalyticDensity& f, const BumpFunction& b, const QuadratureSettings& q) {
  require(b.dim() == f.dim, ErrorCode::BadParams, "test function dimension mismatch");
  if (f.singular_at_origin())
    require(b.distance_to_origin() > 0.0, ErrorCode::SupportTouchesSingularity,
            "test function support must avoid the origin");
  if (f.formula == Formula::halfspace_3d) {
    // <h(x') delta_0(x_3), phi> = int h(x') phi(x', 0) dx'
    const double dist = b.distance_to_origin();
    const double reach = b.center().norm() + b.outer_radius();
    const Vector c2 = b.center().head(2);
    SphereRule ang;
    if (!b.is_shell() && c2.norm() > b.radius() * (1.0 + 1e-12))
      ang = cap_rule(c2.normalized(), std::asin(b.radius() / c2.norm()), q.angular_nodes);
    else
      ang = sphere_rule(2, q.angular_nodes);
    double total = 0.0;
    for (Eigen::Index j = 0; j < ang.size(); ++j) {
      Vector theta = Vector::Zero(3);
      theta.head(2) = ang.nodes.col(j);
      double acc = 0.0;
      for (auto [lo, hi] : ray_support(b, theta, dist)) {
        hi = std::min(hi, reach);
        if (!(hi > lo)) continue;
        const Rule1D rule = composite_gauss(lo, hi, q.radial_panels, q.order);
        acc += rule.integrate([&](double r) {
          return r * f.trace(Vector(r * theta.head(2))) * b(Vector(r * theta));
        });
      }
      total += ang.weights(j) * acc;
    }
    return total;
  }
  return polar_pairing_1d_density(f, b, q);
}

template <class M>
double pair_terms(const M& m, const TestFunction& phi, const QuadratureSettings& q) {
  double acc = 0.0;
  for (const auto& t : phi.terms()) acc += t.coefficient * pair_bump(m, t.bump, q);
  return acc;
}

// int_{S^{d-1}} |g(theta)| d theta (unnormalized)
template <class G>
double sphere_abs_integral(int d, G&& g, int n) {
  const SphereRule rule = sphere_rule(d, n);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < rule.size(); ++j) acc += rule.weights(j) * std::abs(g(Vector(rule.nodes.col(j))));
  return acc;
}

// int_{|x| > eps} F(x) dx by polar quadrature over [eps, rmax] with splits.
template <class F>
double polar_volume(int d, double eps, double rmax, F&& integrand,
                    const std::function<std::vector<double>(const Vector&)>& breaks, const QuadratureSettings& q,
                    int panel_factor = 4) {
  const SphereRule ang = sphere_rule(d, angular_count(d, q));
  double total = 0.0;
  for (Eigen::Index j = 0; j < ang.size(); ++j) {
    const Vector theta = ang.nodes.col(j);
    std::vector<double> cuts{eps};
    if (breaks)
      for (double t : breaks(theta))
        if (t > eps && t < rmax) cuts.push_back(t);
    cuts.push_back(rmax);
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const Rule1D rule = composite_gauss(cuts[k], cuts[k + 1], panel_factor * q.radial_panels, q.order);
      acc += rule.integrate([&](double r) { return std::pow(r, d - 1) * integrand(Vector(r * theta)); });
    }
    total += ang.weights(j) * acc;
  }
  return total;
}

double analytic_integral(const AnalyticDensity& f, double eps, bool absolute, const QuadratureSettings& q) {
  const int d = f.dim;
  if (f.formula == Formula::halfspace_3d) {
    require(absolute, ErrorCode::InfiniteMass, "halfspace_3d has no finite signed total mass near the origin");
    require(eps > 0.0, ErrorCode::NonFinite, "halfspace_3d has infinite variation near the origin");
    return sphere_abs_integral(2, [&](const Vector& t) { return f.trace(t); }, 4 * q.angular_nodes) / eps;
  }
  if (auto gamma = f.homogeneity_degree()) {
    const double beta = -*gamma - d;
    require(eps > 0.0 && beta > 0.0, absolute ? ErrorCode::NonFinite : ErrorCode::InfiniteMass,
            "homogeneous density has infinite mass");
    const double ang = sphere_abs_integral(d, [&](const Vector& t) { return f(t); }, 4 * q.angular_nodes);
    if (!absolute)
      throw Error(ErrorCode::InfiniteMass, "signed mass of a homogeneous density is not absolutely defined");
    return ang * std::pow(eps, -beta) / beta;
  }
  std::function<std::vector<double>(const Vector&)> breaks = [&](const Vector& theta) {
    std::vector<double> out = f.line_breakpoints(Vector::Zero(d), theta);
    const double rho = f.support_radius();
    if (std::isfinite(rho)) {
      const Vector s = f.support_center();
      const double t = theta.dot(s), disc = t * t - s.squaredNorm() + rho * rho;
      if (disc > 0.0) {
        out.push_back(t - std::sqrt(disc));
        out.push_back(t + std::sqrt(disc));
      }
    }
    return out;
  };
  auto value = [&](const Vector& x) { return absolute ? std::abs(f(x)) : f(x); };
  if (f.formula == Formula::proposition_g) {
    const int m = static_cast<int>(std::lround(f.params.at(0)));
    const double lo = std::max(eps, 1.0);
    // Radial integrand decays like r^{-m-1}; truncate where the tail is 1e-13 relative.
    const double T = lo * std::pow(1e13, 1.0 / m);
    const SphereRule ang = sphere_rule(2, q.angular_nodes);
    double total = 0.0;
    for (Eigen::Index j = 0; j < ang.size(); ++j) {
      const Vector theta = ang.nodes.col(j);
      Rule1D rule;
      const double e = std::exp(1.0);
      if (lo < e) {
        rule.append(composite_gauss(lo, e, q.radial_panels, q.order));
        rule.append(geometric_outward(e, e, T, 1.0, q.order));
      } else {
        rule.append(geometric_outward(lo, lo, T, lo, q.order));
      }
      total += ang.weights(j) * rule.integrate([&](double r) { return r * value(Vector(r * theta)); });
    }
    return total;
  }
  const double rmax = f.effective_radius();
  require(std::isfinite(rmax), ErrorCode::NonFinite, "density has no finite effective support");
  if (rmax <= eps) return 0.0;
  return polar_volume(d, eps, rmax, value, breaks, q);
}

}  // namespace

double eval_measure_pairing(const MeasureModel& m, const TestFunction& phi, const QuadratureSettings& q) {
  const double v = std::visit([&](const auto& x) { return pair_terms(x, phi, q); }, m);
  require(std::isfinite(v), ErrorCode::NonFinite, "pairing quadrature produced a non-finite value");
  return v;
}

double total_variation(const MeasureModel& m, double eps, const QuadratureSettings& q) {
  require(eps >= 0.0, ErrorCode::BadParams, "exclusion radius must be non-negative");
  double v = 0.0;
  if (const auto* a = std::get_if<AtomicMeasure>(&m)) {
    for (Eigen::Index j = 0; j < a->size(); ++j)
      if (eps == 0.0 || a->points.col(j).norm() > eps) v += std::abs(a->weights(j));
  } else if (const auto* g = std::get_if<GridDensity>(&m)) {
    for (std::size_t i = 0; i < g->size(); ++i)
      if (eps == 0.0 || g->node(i).norm() > eps) v += g->weight(i) * std::abs(g->samples()[i]);
  } else if (const auto* p = std::get_if<PolarHomogeneous>(&m)) {
    const double e = std::max(eps, p->inner_cutoff), beta = p->beta();
    require(beta > 0.0, ErrorCode::NonFinite, "homogeneous measure with beta <= 0 has infinite mass at infinity");
    require(e > 0.0, ErrorCode::BadParams, "homogeneous measures need a positive exclusion radius");
    if (const auto* s = std::get_if<SpectralMeasure>(&p->angular)) {
      v = std::pow(e, -beta) * s->total_mass();
    } else {
      const auto& u = std::get<AngularDensity>(p->angular);
      v = sphere_abs_integral(p->dim, u, 4 * q.angular_nodes) * std::pow(e, -beta) / beta;
    }
  } else {
    v = analytic_integral(std::get<AnalyticDensity>(m), eps, true, q);
  }
  require(std::isfinite(v), ErrorCode::NonFinite, "total variation is not finite");
  return v;
}

double total_mass(const MeasureModel& m, const QuadratureSettings& q) {
  if (const auto* a = std::get_if<AtomicMeasure>(&m)) return a->weights.sum();
  if (const auto* g = std::get_if<GridDensity>(&m)) {
    double v = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) v += g->weight(i) * g->samples()[i];
    return v;
  }
  if (const auto* p = std::get_if<PolarHomogeneous>(&m)) {
    const double e = p->inner_cutoff, beta = p->beta();
    require(e > 0.0 && beta > 0.0, ErrorCode::InfiniteMass, "homogeneous measure without cutoff has infinite mass");
    if (const auto* s = std::get_if<SpectralMeasure>(&p->angular)) return std::pow(e, -beta) * s->total_mass();
    const auto& u = std::get<AngularDensity>(p->angular);
    const SphereRule rule = sphere_rule(p->dim, 4 * q.angular_nodes);
    double ang = 0.0;
    for (Eigen::Index j = 0; j < rule.size(); ++j) ang += rule.weights(j) * u(Vector(rule.nodes.col(j)));
    return ang * std::pow(e, -beta) / beta;
  }
  return analytic_integral(std::get<AnalyticDensity>(m), 0.0, false, q);
}

}  // namespace exradon
