#include "exradon/radon.hpp"

#include "exradon/random.hpp"
#include "exradon/sphere.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <mutex>
#include <thread>

namespace exradon {

namespace {


double length_scale(const AnalyticDensity& f) {
  switch (f.formula) {
    case Formula::gaussian:
    case Formula::cone_gaussian:
    case Formula::ball_indicator:
    case Formula::bump:
      return f.params.at(0);
    case Formula::derivative_trick:
      return f.base->formula == Formula::gaussian ? f.base->params.at(0) : 1.0;
    case Formula::derivative_blowup:
      return 1.0 / f.params.at(0);
    default:
      return 1.0;
  }
}

int panels_for(double length, double width) {
  return std::max(1, static_cast<int>(std::ceil(length / width - 1e-9)));
}

// Composite rule over [a, b] with extra cuts where the integrand has kinks.
Rule1D piecewise_rule(double a, double b, std::vector<double> cuts, double width, int order) {
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  Rule1D rule;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = std::max(a, cuts[k]), hi = std::min(b, cuts[k + 1]);
    if (hi - lo <= 1e-14 * std::max(1.0, std::abs(lo))) continue;
    rule.append(composite_gauss(lo, hi, panels_for(hi - lo, width), order));
  }
  return rule;
}

double grid_reach(const GridDensity& g) { return g.support_radius() + g.spacing() * std::sqrt(double(g.dim())); }

struct HalfspaceGeometry {
  // {r > r_in : r a < p} as an interval (lo, hi), possibly empty.
  static bool radial_range(double a, double p, double r_in, double& lo, double& hi) {
    if (a < 0.0) {
      lo = std::max(r_in, p / a);
      hi = kInf;
      return true;
    }
    if (a > 0.0) {
      lo = r_in;
      hi = p / a;
      return hi > lo;
    }
    lo = r_in;
    hi = kInf;
    return p > 0.0;
  }
};

bool model_singular_at_origin(const MeasureModel& m) {
  if (const auto* p = std::get_if<PolarHomogeneous>(&m)) return p->inner_cutoff <= 0.0;
  if (const auto* f = std::get_if<AnalyticDensity>(&m)) return f->singular_at_origin();
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(std::min<std::size_t>(n, 256))));
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void SinogramSampling::validate() const {
  require(dim == 2 || dim == 3, ErrorCode::BadParams, "sinograms support d = 2 or d = 3");
  require(n_omega >= 4, ErrorCode::BadParams, "n_omega must be >= 4");
  require(n_p >= 8, ErrorCode::BadParams, "n_p must be >= 8");
  require(p_min < p_max, ErrorCode::BadParams, "p_min must be < p_max");
}

Matrix SinogramSampling::directions() const { return uniform_directions(dim, n_omega); }

std::vector<double> SinogramSampling::offsets() const { return linspace(p_min, p_max, n_p); }

double Sinogram::evenness_defect(double tol) const {
  double worst = 0.0;
  const Eigen::Index n = directions.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if ((directions.col(i) + directions.col(k)).norm() > tol) continue;
      for (std::size_t j = 0; j < offsets.size(); ++j) {
        for (std::size_t l = 0; l < offsets.size(); ++l) {
          if (std::abs(offsets[j] + offsets[l]) > tol) continue;
          worst = std::max(worst, std::abs(values(i, j) - values(k, l)));
        }
      }
    }
  }
  return worst;
}

double Sinogram::interpolate(Eigen::Index i, double p) const {
  const double lo = offsets.front(), hi = offsets.back();
  const double span = hi - lo;
  require(p >= lo - 1e-12 * span && p <= hi + 1e-12 * span, ErrorCode::OffsetOutOfRange,
          "offset outside the sampled range");
  const double u = std::clamp((p - lo) / span * (offsets.size() - 1), 0.0, double(offsets.size() - 1));
  const auto j = std::min<std::size_t>(static_cast<std::size_t>(u), offsets.size() - 2);
  const double t = u - j;
  return (1.0 - t) * values(i, j) + t * values(i, j + 1);
}

std::optional<DecayEnvelope> decay_envelope(const AnalyticDensity& f) {
  if (f.formula == Formula::halfspace_3d) return std::nullopt;
  if (f.formula == Formula::proposition_g) {
    const double m = f.params.at(0);
    const double hmax = std::tgamma(m + 2.0);
    return DecayEnvelope{(f.params.at(2) != 0.0 ? 2.0 : 1.0) * hmax + f.params.at(1), m + 2.0};
  }
  if (auto g = f.homogeneity_degree()) return DecayEnvelope{f.unit_sphere_sup(), -*g};
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Hyperplane integrals

HyperplaneIntegral hyperplane_integral(const AnalyticDensity& f, const Hyperplane& L, const RadonSettings& s) {
  const int d = f.dim;
  require(L.omega.dim() == d, ErrorCode::BadParams, "hyperplane dimension mismatch");
  require(f.formula != Formula::halfspace_3d, ErrorCode::BadParams,
          "halfspace_3d is evaluated through halfspace functionals only");
  const Vector& w = L.omega.vec();
  const double p = L.p;
  HyperplaneIntegral out;
  if (d == 1) {
    out.value = f(Vector(p * w));
    return out;
  }
  require(d == 2 || d == 3, ErrorCode::BadParams, "hyperplane integrals support d <= 3");
  const Matrix frame = orthonormal_complement(w);

  if (auto env = decay_envelope(f)) {
    if (f.singular_at_origin())
      require(std::abs(p) > s.clearance, ErrorCode::HyperplaneHitsSingularity,
              "hyperplane passes within the singular clearance of the origin");
    const double A = env->amplitude, k = env->decay;
    const double ap = std::max(std::abs(p), 1e-300);
    const double scale = A * std::pow(std::max(ap, f.singular_at_origin() ? ap : 1.0), -k);
    const double target = s.tail_tolerance * scale;
    const double S = std::max(4.0 * ap, 4.0);
    const double width = std::max(ap, 0.05) / 4.0;
    const Vector foot = p * w;
    if (d == 2) {
      require(k > 1.0, ErrorCode::NonFinite, "line integral diverges: decay too slow");
      double T = std::pow(2.0 * A / ((k - 1.0) * target), 1.0 / (k - 1.0));
      T = std::max(T, 2.0 * S);
      const Vector e = frame.col(0);
      std::vector<double> cuts = f.line_breakpoints(foot, e);
      Rule1D rule = piecewise_rule(-S, S, cuts, width, s.order);
      Rule1D right = geometric_outward(S, S, T, width * 4.0, s.order);
      for (std::size_t i = 0; i < right.size(); ++i) {
        rule.nodes.push_back(right.nodes[i]);
        rule.weights.push_back(right.weights[i]);
        rule.nodes.push_back(-right.nodes[i]);
        rule.weights.push_back(right.weights[i]);
      }
      out.value = rule.integrate([&](double t) { return f(Vector(foot + t * e)); });
      out.tail_bound = 2.0 * A * std::pow(T, 1.0 - k) / (k - 1.0);
      out.truncation = T;
      return out;
    }
    require(k > 2.0, ErrorCode::NonFinite, "plane integral diverges: decay too slow");
    double T = std::pow(2.0 * pi * A / ((k - 2.0) * target), 1.0 / (k - 2.0));
    T = std::max(T, 2.0 * S);
    Rule1D radial = composite_gauss(0.0, S, panels_for(S, width), s.order);
    radial.append(geometric_outward(S, S, T, width * 4.0, s.order));
    const int na = s.angular_nodes;
    double acc = 0.0;
    for (int j = 0; j < na; ++j) {
      const double phi = 2.0 * pi * j / na;
      const Vector e = std::cos(phi) * frame.col(0) + std::sin(phi) * frame.col(1);
      acc += radial.integrate([&](double r) { return r * f(Vector(foot + r * e)); });
    }
    out.value = acc * 2.0 * pi / na;
    out.tail_bound = 2.0 * pi * A * std::pow(T, 2.0 - k) / (k - 2.0);
    out.truncation = T;
    return out;
  }

  const EffectiveBall ball = effective_ball(f);
  require(std::isfinite(ball.radius), ErrorCode::BadParams, "density has unbounded support and no decay envelope");
  const double dist = ball.center.dot(w) - p;
  if (std::abs(dist) >= ball.radius) return out;
  const double half = std::sqrt(ball.radius * ball.radius - dist * dist);
  const Vector foot = ball.center - dist * w;
  const double width = 0.5 * length_scale(f);
  if (d == 2) {
    const Vector e = frame.col(0);
    const Rule1D rule = piecewise_rule(-half, half, f.line_breakpoints(foot, e), width, s.order);
    out.value = rule.integrate([&](double t) { return f(Vector(foot + t * e)); });
    return out;
  }
  const Rule1D radial = composite_gauss(0.0, half, panels_for(half, width), s.order);
  const int na = s.angular_nodes;
  double acc = 0.0;
  for (int j = 0; j < na; ++j) {
    const double phi = 2.0 * pi * j / na;
    const Vector e = std::cos(phi) * frame.col(0) + std::sin(phi) * frame.col(1);
    acc += radial.integrate([&](double r) { return r * f(Vector(foot + r * e)); });
  }
  out.value = acc * 2.0 * pi / na;
  return out;
}

double hyperplane_integral(const GridDensity& g, const Hyperplane& L, const RadonSettings& s) {
  const int d = g.dim();
  require(L.omega.dim() == d, ErrorCode::BadParams, "hyperplane dimension mismatch");
  const double reach = grid_reach(g);
  const double p = L.p;
  if (std::abs(p) >= reach) return 0.0;
  const Vector& w = L.omega.vec();
  const Matrix frame = orthonormal_complement(w);
  const double half = std::sqrt(reach * reach - p * p);
  const double step = g.spacing() * s.grid_step_factor;
  const int n = static_cast<int>(std::ceil(half / step));
  const Vector foot = p * w;
  double acc = 0.0;
  if (d == 2) {
    const Vector e = frame.col(0);
    for (int i = -n; i <= n; ++i) acc += g.interpolate(Vector(foot + (i * step) * e));
    return acc * step;
  }
  const double h2 = half * half;
  for (int i = -n; i <= n; ++i) {
    const double u = i * step;
    for (int j = -n; j <= n; ++j) {
      const double v = j * step;
      if (u * u + v * v > h2) continue;
      acc += g.interpolate(Vector(foot + u * frame.col(0) + v * frame.col(1)));
    }
  }
  return acc * step * step;
}

Sinogram radon_forward(const MeasureModel& m, const SinogramSampling& sampling, const RadonSettings& s) {
  sampling.validate();
  require(dim(m) == sampling.dim, ErrorCode::BadParams, "sampling dimension does not match the measure");
  const auto* grid = std::get_if<GridDensity>(&m);
  const auto* analytic = std::get_if<AnalyticDensity>(&m);
  require(grid || analytic, ErrorCode::BadParams, "radon_forward accepts grid or analytic densities");
  Sinogram out;
  out.sampling = sampling;
  out.directions = sampling.directions();
  out.offsets = sampling.offsets();
  out.values = Matrix::Zero(out.directions.cols(), sampling.n_p);
  parallel_for(static_cast<std::size_t>(out.directions.cols()), s.threads, [&](std::size_t i) {
    const Direction w(Vector(out.directions.col(i)));
    for (int j = 0; j < sampling.n_p; ++j) {
      const Hyperplane L{w, out.offsets[j]};
      out.values(i, j) = grid ? hyperplane_integral(*grid, L, s) : hyperplane_integral(*analytic, L, s).value;
    }
  });
  return out;
}

Pushforward radon_pushforward(const MeasureModel& m, const Direction& omega, const RadonSettings& s) {
  require(dim(m) == omega.dim(), ErrorCode::BadParams, "direction dimension does not match the measure");
  Pushforward out;
  if (const auto* a = std::get_if<AtomicMeasure>(&m)) {
    Matrix pts(1, a->size());
    for (Eigen::Index j = 0; j < a->size(); ++j) pts(0, j) = omega.dot(a->points.col(j));
    out.atoms = AtomicMeasure(pts, a->weights);
    return out;
  }
  Rule1D rule;
  std::function<double(double)> line;
  if (const auto* g = std::get_if<GridDensity>(&m)) {
    const double reach = grid_reach(*g);
    rule = composite_gauss(-reach, reach, panels_for(2.0 * reach, g->spacing()), 4);
    line = [&, g](double p) { return hyperplane_integral(*g, Hyperplane{omega, p}, s); };
  } else if (const auto* f = std::get_if<AnalyticDensity>(&m)) {
    require(!decay_envelope(*f) && f->formula != Formula::halfspace_3d, ErrorCode::InfiniteMass,
            "push-forward needs a finite measure");
    const EffectiveBall ball = effective_ball(*f);
    const double c = ball.center.dot(omega.vec());
    if (f->dim == 1) {
      rule = piecewise_rule(c - ball.radius, c + ball.radius, {}, 0.5 * length_scale(*f), s.order);
      line = [&, f](double p) { return (*f)(Vector(p * omega.vec())); };
    } else {
      rule = composite_gauss(c - ball.radius, c + ball.radius, panels_for(2.0 * ball.radius, 0.5 * length_scale(*f)),
                             s.order);
      line = [&, f](double p) { return hyperplane_integral(*f, Hyperplane{omega, p}, s).value; };
    }
  } else {
    throw Error(ErrorCode::InfiniteMass, "push-forward of a homogeneous measure needs a finite model");
  }
  out.nodes = rule.nodes;
  out.weights = rule.weights;
  out.values.resize(rule.size());
  parallel_for(rule.size(), s.threads, [&](std::size_t i) { out.values[i] = line(rule.nodes[i]); });
  return out;
}

double dual_transform(const HyperplaneFunction& psi, const Matrix& directions, const Eigen::Ref<const Vector>& x) {
  require(directions.cols() >= 1 && directions.rows() == x.size(), ErrorCode::BadParams,
          "direction set does not match the point");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < directions.cols(); ++i) {
    const Vector w = directions.col(i);
    acc += psi(w, w.dot(x));
  }
  return acc / directions.cols();
}

double dual_transform(const Sinogram& psi, const Eigen::Ref<const Vector>& x) {
  require(psi.directions.rows() == x.size(), ErrorCode::BadParams, "sinogram dimension does not match the point");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < psi.directions.cols(); ++i) acc += psi.interpolate(i, psi.directions.col(i).dot(x));
  return acc / psi.directions.cols();
}

AdjointReport adjoint_residual(const GridDensity& phi, const HyperplaneFunction& psi, int n_omega,
                               const RadonSettings& s) {
  const int d = phi.dim();
  const Matrix dirs = uniform_directions(d, n_omega);
  const double reach = grid_reach(phi);
  const double h = phi.spacing();
  const int np = static_cast<int>(std::ceil(reach / h));
  std::vector<double> rows(dirs.cols(), 0.0);
  parallel_for(rows.size(), s.threads, [&](std::size_t i) {
    const Vector w = dirs.col(i);
    const Direction dir(w);
    double acc = 0.0;
    for (int j = -np; j <= np; ++j) {
      const double p = j * h;
      const double r = hyperplane_integral(phi, Hyperplane{dir, p}, s);
      if (r != 0.0) acc += r * psi(w, p);
    }
    rows[i] = acc * h;
  });
  double lhs = 0.0;
  for (double r : rows) lhs += r;
  lhs /= static_cast<double>(rows.size());
  double rhs = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double v = phi.samples()[i];
    if (v == 0.0) continue;
    rhs += phi.weight(i) * v * dual_transform(psi, dirs, phi.node(i));
  }
  AdjointReport rep{lhs, rhs, 0.0};
  const double denom = std::abs(lhs);
  rep.residual = denom > 0.0 ? std::abs(lhs - rhs) / denom : std::abs(lhs - rhs);
  return rep;
}

// ---------------------------------------------------------------------------
// Halfspace functionals

namespace {

double polar_halfspace(const PolarHomogeneous& m, const Halfspace& h, int angular_nodes) {
  const int d = m.dim;
  const double beta = m.beta();
  require(beta > 0.0, ErrorCode::NonFinite, "halfspace mass diverges at infinity for beta <= 0");
  const double eps = std::max(0.0, m.inner_cutoff);
  const Vector& w = h.omega.vec();
  auto radial_mass = [&](double lo, double hi) {
    const double a = std::pow(lo, -beta);
    const double b = std::isfinite(hi) ? std::pow(hi, -beta) : 0.0;
    return a - b;
  };
  if (const auto* s = std::get_if<SpectralMeasure>(&m.angular)) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < s->size(); ++j) {
      double lo, hi;
      if (HalfspaceGeometry::radial_range(s->atoms.col(j).dot(w), h.p, eps, lo, hi) && lo > 0.0)
        acc += s->weights(j) * radial_mass(lo, hi);
    }
    return acc;
  }
  const auto& u = std::get<AngularDensity>(m.angular);
  const SphereRule rule = h.p < 0.0 ? cap_rule(Vector(-w), pi / 2.0, d == 3 ? angular_nodes / 2 : angular_nodes)
                                    : sphere_rule(d, d == 3 ? angular_nodes / 2 : 4 * angular_nodes);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < rule.size(); ++j) {
    const Vector theta = rule.nodes.col(j);
    double lo, hi;
    if (HalfspaceGeometry::radial_range(theta.dot(w), h.p, eps, lo, hi) && lo > 0.0)
      acc += rule.weights(j) * u(theta) * radial_mass(lo, hi) / beta;
  }
  return acc;
}

double homogeneous_analytic_halfspace(const AnalyticDensity& f, const Halfspace& h, int angular_nodes) {
  const int d = f.dim;
  const double beta = -*f.homogeneity_degree() - d;
  require(beta > 0.0, ErrorCode::NonFinite, "halfspace mass of a degree -d density is not absolutely convergent");
  const Vector& w = h.omega.vec();
  const SphereRule rule = cap_rule(Vector(-w), pi / 2.0, d == 3 ? angular_nodes / 2 : angular_nodes);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < rule.size(); ++j) {
    const Vector theta = rule.nodes.col(j);
    const double a = theta.dot(w);
    if (a >= 0.0) continue;
    acc += rule.weights(j) * f(theta) * std::pow(-a, beta);
  }
  return acc * std::pow(std::abs(h.p), -beta) / beta;
}

}  // namespace

double halfspace_trace_mass(const std::function<double(const Vector&)>& trace, const Halfspace& h, int angular_nodes) {
  require(h.omega.dim() == 3, ErrorCode::BadParams, "trace measures live in d = 3");
  require(h.p < 0.0, ErrorCode::HalfspaceTouchesOrigin, "halfspace must be bounded away from the origin");
  const Vector& w = h.omega.vec();
  const Vector wp = w.head(2);
  const double n = wp.norm();
  if (n <= 1e-15) return 0.0;  // {x_3 w_3 < p} misses the plane x_3 = 0 since p < 0
  const Vector nu = wp / n;
  const double pp = h.p / n;
  // int_{theta . nu < 0} h(theta) (-theta . nu) d theta / |p'|; radial part exact.
  const SphereRule rule = cap_rule(Vector(-nu), pi / 2.0, angular_nodes);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < rule.size(); ++j) {
    const Vector theta = rule.nodes.col(j);
    const double a = theta.dot(nu);
    if (a >= 0.0) continue;
    acc += rule.weights(j) * trace(theta) * (-a);
  }
  return acc / std::abs(pp);
}

namespace {

// Radial quadrature from the origin for densities that vanish on the unit
// ball and decay algebraically (proposition_g).
double decaying_analytic_halfspace(const AnalyticDensity& f, const Halfspace& h, const RadonSettings& s) {
  const auto env = decay_envelope(f);
  const int d = f.dim;
  const Vector& w = h.omega.vec();
  const double k = env->decay;
  const double beta = k - d;
  const double T = std::pow(sphere_area(d) / (beta * 1e-13), 1.0 / beta);  // tail below 1e-13 A
  const SphereRule rule = h.p < 0.0 ? cap_rule(Vector(-w), pi / 2.0, s.angular_nodes)
                                    : sphere_rule(d, 4 * s.angular_nodes);
  const double e = std::exp(1.0);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < rule.size(); ++j) {
    const Vector theta = rule.nodes.col(j);
    double lo, hi;
    if (!HalfspaceGeometry::radial_range(theta.dot(w), h.p, 1.0, lo, hi)) continue;
    hi = std::min(hi, T);
    if (!(hi > lo)) continue;
    Rule1D radial;
    if (lo < e) {
      const double mid = std::min(e, hi);
      radial.append(composite_gauss(lo, mid, 4, s.order));
      if (hi > e) radial.append(geometric_outward(e, e, hi, 1.0, s.order));
    } else {
      radial.append(geometric_outward(lo, lo, hi, lo, s.order));
    }
    acc += rule.weights(j) * radial.integrate([&](double r) { return std::pow(r, d - 1) * f(Vector(r * theta)); });
  }
  return acc;
}

}  // namespace

double halfspace_mass(const MeasureModel& m, const Halfspace& h, const RadonSettings& s) {
  require(dim(m) == h.omega.dim(), ErrorCode::BadParams, "halfspace dimension does not match the measure");
  if (model_singular_at_origin(m))
    require(h.bounded_away_from_origin(), ErrorCode::HalfspaceTouchesOrigin,
            "halfspace closure must avoid the origin for this measure");
  const Vector& w = h.omega.vec();
  if (const auto* a = std::get_if<AtomicMeasure>(&m)) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < a->size(); ++j)
      if (w.dot(a->points.col(j)) < h.p) acc += a->weights(j);
    return acc;
  }
  if (const auto* p = std::get_if<PolarHomogeneous>(&m)) return polar_halfspace(*p, h, s.angular_nodes);
  if (const auto* g = std::get_if<GridDensity>(&m)) {
    const double reach = grid_reach(*g);
    const double hi = std::min(h.p, reach);
    if (hi <= -reach) return 0.0;
    const Rule1D rule = composite_gauss(-reach, hi, panels_for(hi + reach, g->spacing()), 4);
    return rule.integrate([&](double t) { return hyperplane_integral(*g, Hyperplane{h.omega, t}, s); });
  }
  const auto& f = std::get<AnalyticDensity>(m);
  if (f.formula == Formula::halfspace_3d)
    return halfspace_trace_mass([&](const Vector& x) { return f.trace(x); }, h, s.angular_nodes);
  if (f.formula == Formula::proposition_g) return decaying_analytic_halfspace(f, h, s);
  if (f.homogeneity_degree()) return homogeneous_analytic_halfspace(f, h, s.angular_nodes);
  if (f.dim >= 4) {
    require(f.formula == Formula::gaussian, ErrorCode::BadParams, "d >= 4 halfspace masses support gaussians only");
    return halfspace_mass_monte_carlo(f, h, 1000000, 0).first;
  }
  const EffectiveBall ball = effective_ball(f);
  const double c = ball.center.dot(w);
  const double lo = c - ball.radius, hi = std::min(h.p, c + ball.radius);
  if (hi <= lo) return 0.0;
  const double width = length_scale(f);
  if (f.dim == 1) {
    const Rule1D rule = piecewise_rule(lo, hi, {}, 0.5 * width, s.order);
    return rule.integrate([&](double t) { return f(Vector(t * w)); });
  }
  const Rule1D rule = composite_gauss(lo, hi, panels_for(hi - lo, width), s.order);
  return rule.integrate([&](double t) { return hyperplane_integral(f, Hyperplane{h.omega, t}, s).value; });
}

std::pair<double, double> halfspace_mass_monte_carlo(const AnalyticDensity& f, const Halfspace& h, std::size_t n,
                                                     std::uint64_t seed) {
  require(f.formula == Formula::gaussian, ErrorCode::BadParams, "Monte Carlo halfspace masses need a gaussian");
  require(n >= 2, ErrorCode::TooFewSamples, "Monte Carlo needs at least two samples");
  Philox rng(seed, 0);
  const double sigma = f.params.at(0);
  Vector x(f.dim);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < f.dim; ++k) x(k) = f.params.at(1 + k) + sigma * rng.normal();
    if (h.contains(x)) ++hits;
  }
  const double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

DerivativeResidual halfspace_derivative_residual(const MeasureModel& m, const Direction& omega, const BumpFunction& phi,
                                                 const RadonSettings& s) {
  require(phi.dim() == 1, ErrorCode::BadParams, "the test function lives on the real line");
  DerivativeResidual out{};
  const Pushforward pf = radon_pushforward(m, omega, s);
  out.pushforward_pairing = pf.integrate([&](double p) { return phi(p); });
  const double c = phi.center()(0), R = phi.radius();
  std::vector<double> cuts;
  if (pf.atoms)
    for (Eigen::Index j = 0; j < pf.atoms->size(); ++j) cuts.push_back(pf.atoms->points(0, j));
  // Exact step functions (atoms) are cheap, so refine further there.
  const Rule1D rule = piecewise_rule(c - R, c + R, cuts, pf.atoms ? R / 32.0 : R / 8.0, s.order);
  std::vector<double> vals(rule.size());
  parallel_for(rule.size(), s.threads, [&](std::size_t i) {
    vals[i] = halfspace_mass(m, Halfspace{omega, rule.nodes[i]}, s) * phi.derivatives(rule.nodes[i])[1];
  });
  for (std::size_t i = 0; i < rule.size(); ++i) out.halfspace_side += rule.weights[i] * vals[i];
  out.residual = std::abs(out.pushforward_pairing + out.halfspace_side);
  return out;
}

// ---------------------------------------------------------------------------
// Odd-dimension inversion

std::vector<double> filtered_backprojection_3d(const GridDensity& phi, const InversionSettings& is,
                                               const RadonSettings& s) {
  require(phi.dim() == 3, ErrorCode::BadParams, "the inversion check runs in d = 3");
  const double reach = grid_reach(phi);
  SinogramSampling samp;
  samp.dim = 3;
  samp.n_omega = is.n_omega;
  samp.n_p = is.n_p;
  samp.p_min = -reach;
  samp.p_max = reach;
  RadonSettings rs = s;
  rs.grid_step_factor = std::max(s.grid_step_factor, 1.0);
  const Sinogram sino = radon_forward(phi, samp, rs);
  const double dp = samp.p_step();
  Sinogram filtered = sino;
  for (Eigen::Index i = 0; i < sino.values.rows(); ++i)
    for (int j = 0; j < samp.n_p; ++j) {
      const double left = j > 0 ? sino.values(i, j - 1) : 0.0;
      const double right = j + 1 < samp.n_p ? sino.values(i, j + 1) : 0.0;
      filtered.values(i, j) = -(left - 2.0 * sino.values(i, j) + right) / (dp * dp);
    }
  std::vector<double> out(phi.size(), 0.0);
  parallel_for(phi.size(), s.threads, [&](std::size_t k) {
    const Vector x = phi.node(k);
    if (x.norm() >= reach) return;
    out[k] = dual_transform(filtered, x);
  });
  return out;
}

namespace {

double fit_residual(const GridDensity& phi, const std::vector<double>& b, double c) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double w = phi.weight(i), f = phi.samples()[i];
    num += w * (f - c * b[i]) * (f - c * b[i]);
    den += w * f * f;
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace

InversionReport odd_d_inversion_check(const GridDensity& phi, const InversionSettings& is, const RadonSettings& s) {
  const std::vector<double> b = filtered_backprojection_3d(phi, is, s);
  double fb = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    fb += phi.weight(i) * phi.samples()[i] * b[i];
    bb += phi.weight(i) * b[i] * b[i];
  }
  InversionReport rep;
  rep.c = bb > 0.0 ? fb / bb : 0.0;
  rep.residual = fit_residual(phi, b, rep.c);
  return rep;
}

double inversion_residual(const GridDensity& phi, double c, const InversionSettings& is, const RadonSettings& s) {
  return fit_residual(phi, filtered_backprojection_3d(phi, is, s), c);
}

}  // namespace exradon
