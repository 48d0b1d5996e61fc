#include "exradon/model.hpp"
#include "exradon/quadrature.hpp"
#include "exradon/sphere.hpp"

#include <unsupported/Eigen/AutoDiff>

#include <algorithm>
#include <limits>

namespace exradon {

namespace {

// Fixed-size derivative vectors (d <= 3, unused slots stay zero) so that
// constants promote to coherent zero derivatives in nested expressions.
using Grad = Eigen::Matrix<double, 3, 1>;
using AD1 = Eigen::AutoDiffScalar<Grad>;
using AD1Vector = Eigen::Matrix<AD1, 3, 1>;
using AD2 = Eigen::AutoDiffScalar<AD1Vector>;


// (u + i v)^n by repeated multiplication; works for any real scalar type.
template <class S>
void complex_power(const S& u, const S& v, int n, S& re, S& im) {
  re = S(1.0);
  im = S(0.0);
  for (int j = 0; j < n; ++j) {
    S r2 = re * u - im * v;
    S i2 = re * v + im * u;
    re = r2;
    im = i2;
  }
}

template <class S>
S legendre(int n, const S& t) {
  if (n == 0) return S(1.0);
  S p0(1.0), p1 = t;
  for (int k = 1; k < n; ++k) {
    S p2 = ((2.0 * k + 1.0) * t * p1 - double(k) * p0) / double(k + 1);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

int param_int(const AnalyticDensity& f, std::size_t i) {
  return static_cast<int>(std::lround(f.params.at(i)));
}

Vector center_from(const AnalyticDensity& f, std::size_t offset) {
  Vector c = Vector::Zero(f.dim);
  for (int i = 0; i < f.dim && offset + i < f.params.size(); ++i) c(i) = f.params[offset + i];
  return c;
}

template <class S>
S smooth_formula(const AnalyticDensity& f, const VectorX<S>& x) {
  using std::exp;
  using std::sqrt;
  switch (f.formula) {
    case Formula::gaussian: {
      const double sigma = f.params.at(0);
      S r2(0.0);
      for (int i = 0; i < f.dim; ++i) {
        S dx = x(i) - f.params.at(1 + i);
        r2 += dx * dx;
      }
      return exp(-r2 / (2.0 * sigma * sigma)) / std::pow(2.0 * pi * sigma * sigma, 0.5 * f.dim);
    }
    case Formula::inverse_zk: {
      const int k = param_int(f, 0);
      S r2 = x(0) * x(0) + x(1) * x(1);
      S re, im;
      complex_power<S>(x(0) / r2, -x(1) / r2, k, re, im);
      return param_int(f, 1) == 0 ? re : im;
    }
    case Formula::meanzero_homog: {
      const int n = param_int(f, 0);
      if (f.dim == 2) {
        S r2 = x(0) * x(0) + x(1) * x(1);
        S r = sqrt(r2);
        S re, im;
        complex_power<S>(x(0) / r, x(1) / r, n, re, im);
        return (f.params.at(1) * re + f.params.at(2) * im) / r2;
      }
      S r2 = x(0) * x(0) + x(1) * x(1) + x(2) * x(2);
      S r = sqrt(r2);
      return f.params.at(1) * legendre<S>(n, x(2) / r) / (r2 * r);
    }
    default:
      throw Error(ErrorCode::BadParams,
                  std::string("formula cannot be differentiated: ") + to_string(f.formula));
  }
}

double derivative_of(const AnalyticDensity& base, const std::vector<int>& beta,
                     const Eigen::Ref<const Vector>& xv) {
  const int d = base.dim;
  require(d <= 3, ErrorCode::BadParams, "derivative_trick supports d <= 3");
  std::vector<int> axes;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < beta[i]; ++j) axes.push_back(i);
  if (axes.empty()) return smooth_formula<double>(base, Vector(xv));
  if (axes.size() == 1) {
    VectorX<AD1> x(d);
    for (int i = 0; i < d; ++i) x(i) = AD1(xv(i), 3, i);
    return smooth_formula<AD1>(base, x).derivatives()(axes[0]);
  }
  VectorX<AD2> x(d);
  for (int i = 0; i < d; ++i) {
    AD1Vector outer;
    for (int j = 0; j < 3; ++j) outer(j) = AD1(0.0, Grad::Zero());
    outer(i) = AD1(1.0, Grad::Zero());
    x(i) = AD2(AD1(xv(i), 3, i), outer);
  }
  const AD2 y = smooth_formula<AD2>(base, x);
  return y.derivatives()(axes[1]).derivatives()(axes[0]);
}

double blowup_normalizer() {
  static const double z = [] {
    const Rule1D rule = composite_gauss(-1.0, 1.0, 16, 32);
    return rule.integrate([](double t) { return mollifier_jet(t * t)[0]; });
  }();
  return z;
}

// h_m = d_{x1}^m Re(z^-2) = (-1)^m (m+1)! Re(z^{-2-m}) on |x| > 1.
double proposition_h(int m, const Eigen::Ref<const Vector>& x) {
  const double r2 = x.squaredNorm();
  if (r2 <= 1.0) return 0.0;
  double re, im;
  complex_power<double>(x(0) / r2, -x(1) / r2, m + 2, re, im);
  const double fact = std::tgamma(m + 2.0);
  return ((m % 2 == 0) ? fact : -fact) * re;
}

double proposition_q(double r) {
  if (r <= std::exp(1.0)) return 0.0;
  return 2.0 * std::sin(std::log(std::log(r)));
}

// Roots t of |p + t v - c|^2 = R^2.
void sphere_crossings(const Vector& p, const Vector& v, const Vector& c, double R,
                      std::vector<double>& out) {
  const Vector w = p - c;
  const double a = v.squaredNorm(), b = 2.0 * w.dot(v), cc = w.squaredNorm() - R * R;
  const double disc = b * b - 4.0 * a * cc;
  if (disc <= 0.0 || a == 0.0) return;
  const double s = std::sqrt(disc);
  out.push_back((-b - s) / (2.0 * a));
  out.push_back((-b + s) / (2.0 * a));
}

}  // namespace

const char* to_string(Formula f) {
  switch (f) {
    case Formula::gaussian: return "gaussian";
    case Formula::ball_indicator: return "ball_indicator";
    case Formula::bump: return "bump";
    case Formula::cone_gaussian: return "cone_gaussian";
    case Formula::inverse_zk: return "inverse_zk";
    case Formula::meanzero_homog: return "meanzero_homog";
    case Formula::derivative_trick: return "derivative_trick";
    case Formula::proposition_g: return "proposition_g";
    case Formula::derivative_blowup: return "derivative_blowup";
    case Formula::halfspace_3d: return "halfspace_3d";
  }
  return "unknown";
}

Formula formula_from_string(const std::string& s) {
  for (Formula f : {Formula::gaussian, Formula::ball_indicator, Formula::bump, Formula::cone_gaussian,
                    Formula::inverse_zk, Formula::meanzero_homog, Formula::derivative_trick,
                    Formula::proposition_g, Formula::derivative_blowup, Formula::halfspace_3d})
    if (s == to_string(f)) return f;
  throw Error(ErrorCode::BadParams, "unknown analytic formula '" + s + "'");
}

AnalyticDensity AnalyticDensity::gaussian(int d, double sigma, Vector center) {
  require(sigma > 0.0, ErrorCode::BadParams, "gaussian sigma must be positive");
  if (center.size() == 0) center = Vector::Zero(d);
  require(center.size() == d, ErrorCode::BadParams, "gaussian center has wrong dimension");
  AnalyticDensity f;
  f.formula = Formula::gaussian;
  f.dim = d;
  f.params = {sigma};
  f.params.insert(f.params.end(), center.data(), center.data() + d);
  return f;
}

AnalyticDensity AnalyticDensity::ball_indicator(int d, double radius, Vector center) {
  require(radius > 0.0, ErrorCode::BadParams, "ball radius must be positive");
  if (center.size() == 0) center = Vector::Zero(d);
  require(center.size() == d, ErrorCode::BadParams, "ball center has wrong dimension");
  AnalyticDensity f;
  f.formula = Formula::ball_indicator;
  f.dim = d;
  f.params = {radius};
  f.params.insert(f.params.end(), center.data(), center.data() + d);
  return f;
}

AnalyticDensity AnalyticDensity::bump(const BumpFunction& b) {
  require(!b.is_shell(), ErrorCode::BadParams, "bump densities must be ball bumps");
  AnalyticDensity f;
  f.formula = Formula::bump;
  f.dim = b.dim();
  f.params = {b.radius(), b.amplitude()};
  f.params.insert(f.params.end(), b.center().data(), b.center().data() + b.dim());
  return f;
}

AnalyticDensity AnalyticDensity::cone_gaussian(int d, double sigma, double delta, Vector center) {
  require(sigma > 0.0 && delta > 0.0, ErrorCode::BadParams, "cone gaussian needs sigma, delta > 0");
  require(center.size() == d, ErrorCode::BadParams, "cone gaussian center has wrong dimension");
  AnalyticDensity f;
  f.formula = Formula::cone_gaussian;
  f.dim = d;
  f.params = {sigma, delta};
  f.params.insert(f.params.end(), center.data(), center.data() + d);
  return f;
}

AnalyticDensity AnalyticDensity::derivative_blowup(double k) {
  require(k > 0.0, ErrorCode::BadParams, "blow-up index must be positive");
  AnalyticDensity f;
  f.formula = Formula::derivative_blowup;
  f.dim = 1;
  f.params = {k};
  return f;
}

AnalyticDensity AnalyticDensity::inverse_zk(int k, bool imaginary) {
  require(k >= 1, ErrorCode::BadParams, "inverse_zk needs k >= 1");
  AnalyticDensity f;
  f.formula = Formula::inverse_zk;
  f.dim = 2;
  f.params = {double(k), imaginary ? 1.0 : 0.0};
  return f;
}

AnalyticDensity AnalyticDensity::meanzero_homog_2d(int n, double a, double b) {
  require(n >= 1, ErrorCode::BadParams, "harmonic order must be >= 1 for a mean-zero density");
  AnalyticDensity f;
  f.formula = Formula::meanzero_homog;
  f.dim = 2;
  f.params = {double(n), a, b};
  return f;
}

AnalyticDensity AnalyticDensity::meanzero_homog_3d(int n, double a) {
  require(n >= 1, ErrorCode::BadParams, "zonal order must be >= 1 for a mean-zero density");
  AnalyticDensity f;
  f.formula = Formula::meanzero_homog;
  f.dim = 3;
  f.params = {double(n), a};
  return f;
}

AnalyticDensity AnalyticDensity::derivative_trick(const AnalyticDensity& base, std::vector<int> beta) {
  require(static_cast<int>(beta.size()) == base.dim, ErrorCode::BadParams,
          "multi-index length must equal the dimension");
  int order = 0;
  for (int b : beta) {
    require(b >= 0, ErrorCode::BadParams, "multi-index entries must be non-negative");
    order += b;
  }
  require(order <= 2, ErrorCode::BadParams, "derivative order |beta| <= 2 supported");
  require(base.formula == Formula::inverse_zk || base.formula == Formula::meanzero_homog ||
              base.formula == Formula::gaussian,
          ErrorCode::BadParams, "derivative_trick base must be inverse_zk, meanzero_homog or gaussian");
  AnalyticDensity f;
  f.formula = Formula::derivative_trick;
  f.dim = base.dim;
  f.multi_index = std::move(beta);
  f.base = std::make_shared<const AnalyticDensity>(base);
  return f;
}

AnalyticDensity AnalyticDensity::proposition_g(int m, double C, bool oscillate) {
  require(m >= 1, ErrorCode::BadParams, "proposition order m must be >= 1");
  require(C >= 0.0, ErrorCode::BadParams, "non-negativity constant must be >= 0");
  AnalyticDensity f;
  f.formula = Formula::proposition_g;
  f.dim = 2;
  f.params = {double(m), C, oscillate ? 1.0 : 0.0};
  return f;
}

AnalyticDensity AnalyticDensity::halfspace_3d() {
  AnalyticDensity f;
  f.formula = Formula::halfspace_3d;
  f.dim = 3;
  return f;
}

double AnalyticDensity::operator()(const Eigen::Ref<const Vector>& x) const {
  require(x.size() == dim, ErrorCode::BadParams, "evaluation point has wrong dimension");
  switch (formula) {
    case Formula::gaussian:
    case Formula::inverse_zk:
    case Formula::meanzero_homog:
      return smooth_formula<double>(*this, Vector(x));
    case Formula::ball_indicator:
      return (x - center_from(*this, 1)).norm() < params.at(0) ? 1.0 : 0.0;
    case Formula::bump: {
      const double s = (x - center_from(*this, 2)).norm() / params.at(0);
      return params.at(1) * mollifier_jet(s * s)[0];
    }
    case Formula::cone_gaussian: {
      const double delta = params.at(1);
      if (x(dim - 1) < delta * x.head(dim - 1).norm()) return 0.0;
      const double sigma = params.at(0);
      const double r2 = (x - center_from(*this, 2)).squaredNorm();
      return std::exp(-r2 / (2.0 * sigma * sigma)) / std::pow(2.0 * pi * sigma * sigma, 0.5 * dim);
    }
    case Formula::derivative_trick:
      return derivative_of(*base, multi_index, x);
    case Formula::proposition_g: {
      const int m = param_int(*this, 0);
      const double r = x.norm();
      if (r <= 1.0) return 0.0;
      const double q = params.at(2) != 0.0 ? proposition_q(r) : 1.0;
      return q * proposition_h(m, x) + params.at(1) * std::pow(r, -m - 2.0);
    }
    case Formula::derivative_blowup: {
      const double k = params.at(0);
      const double y = k * x(0);
      return k * k * 2.0 * y * mollifier_jet(y * y)[1] / blowup_normalizer();
    }
    case Formula::halfspace_3d:
      throw Error(ErrorCode::BadParams, "halfspace_3d is a singular measure; use trace()");
  }
  return 0.0;
}

double AnalyticDensity::trace(const Eigen::Ref<const Vector>& xp) const {
  require(formula == Formula::halfspace_3d, ErrorCode::BadParams, "trace() is defined for halfspace_3d");
  const double r2 = xp.squaredNorm();
  const double x1 = xp(0), x2 = xp(1);
  return x2 / (r2 * r2) - 4.0 * x1 * x1 * x2 / (r2 * r2 * r2);
}

EffectiveBall effective_ball(const AnalyticDensity& f) {
  switch (f.formula) {
    case Formula::gaussian: return {center_from(f, 1), 12.0 * f.params.at(0)};
    case Formula::cone_gaussian: return {center_from(f, 2), 12.0 * f.params.at(0)};
    case Formula::derivative_trick:
      if (f.base->formula == Formula::gaussian) return effective_ball(*f.base);
      return {Vector::Zero(f.dim), kInf};
    default: return {f.support_center(), f.support_radius()};
  }
}

bool AnalyticDensity::singular_at_origin() const {
  switch (formula) {
    case Formula::inverse_zk:
    case Formula::meanzero_homog:
    case Formula::halfspace_3d:
      return true;
    case Formula::derivative_trick:
      return base->singular_at_origin();
    default:
      return false;
  }
}

std::optional<double> AnalyticDensity::homogeneity_degree() const {
  switch (formula) {
    case Formula::inverse_zk:
      return -params.at(0);
    case Formula::meanzero_homog:
      return -double(dim);
    case Formula::derivative_trick: {
      auto g = base->homogeneity_degree();
      if (!g) return std::nullopt;
      int order = 0;
      for (int b : multi_index) order += b;
      return *g - order;
    }
    case Formula::halfspace_3d:
      return -4.0;  // as a measure on R^3: trace of degree -3 times delta_0(x_3)
    default:
      return std::nullopt;
  }
}

Vector AnalyticDensity::support_center() const {
  switch (formula) {
    case Formula::ball_indicator: return center_from(*this, 1);
    case Formula::bump: return center_from(*this, 2);
    default: return Vector::Zero(dim);
  }
}

double AnalyticDensity::support_radius() const {
  switch (formula) {
    case Formula::ball_indicator:
    case Formula::bump:
      return params.at(0);
    case Formula::derivative_blowup:
      return 1.0 / params.at(0);
    default:
      return kInf;
  }
}

double AnalyticDensity::effective_radius() const {
  const EffectiveBall b = effective_ball(*this);
  return b.center.norm() + b.radius;
}

double AnalyticDensity::unit_sphere_sup() const {
  switch (formula) {
    case Formula::inverse_zk:
      return 1.0;
    case Formula::meanzero_homog:
      return dim == 2 ? std::hypot(params.at(1), params.at(2)) : std::abs(params.at(1));
    default:
      break;
  }
  const Matrix dirs = dim == 2 ? equiangular_directions(4096) : fibonacci_directions(8192);
  double s = 0.0;
  for (Eigen::Index j = 0; j < dirs.cols(); ++j) {
    const Vector x = dirs.col(j);
    const double v = formula == Formula::halfspace_3d ? trace(x.head(2)) : (*this)(x);
    s = std::max(s, std::abs(v));
  }
  return 1.05 * s;
}

std::vector<double> AnalyticDensity::line_breakpoints(const Vector& point, const Vector& direction) const {
  std::vector<double> out;
  switch (formula) {
    case Formula::ball_indicator:
      sphere_crossings(point, direction, center_from(*this, 1), params.at(0), out);
      break;
    case Formula::proposition_g:
      sphere_crossings(point, direction, Vector::Zero(dim), 1.0, out);
      sphere_crossings(point, direction, Vector::Zero(dim), std::exp(1.0), out);
      break;
    case Formula::cone_gaussian: {
      // (x_d)^2 = delta^2 |x'|^2 with x_d >= 0
      const double delta = params.at(1);
      const int n = dim - 1;
      const double pd = point(n), vd = direction(n);
      const Vector pp = point.head(n), vp = direction.head(n);
      const double a = vd * vd - delta * delta * vp.squaredNorm();
      const double b = 2.0 * (pd * vd - delta * delta * pp.dot(vp));
      const double c = pd * pd - delta * delta * pp.squaredNorm();
      std::vector<double> roots;
      if (std::abs(a) < 1e-14) {
        if (std::abs(b) > 1e-300) roots.push_back(-c / b);
      } else {
        double disc = b * b - 4.0 * a * c;
        // a line through the apex gives a double root; keep it despite rounding
        if (disc < 0.0 && disc > -1e-12 * (b * b + std::abs(4.0 * a * c))) disc = 0.0;
        if (disc >= 0.0) {
          const double s = std::sqrt(disc);
          roots.push_back((-b - s) / (2.0 * a));
          roots.push_back((-b + s) / (2.0 * a));
        }
      }
      for (double t : roots)
        if (pd + t * vd >= -1e-12) out.push_back(t);
      break;
    }
    default:
      break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace exradon
