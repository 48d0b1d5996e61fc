#pragma once

#include "exradon/bump.hpp"
#include "exradon/core.hpp"

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace exradon {

inline constexpr int kMaxDim = 6;

/// Unit vector omega in S^{d-1}.
class Direction {
 public:
  /// Throws BadParams unless |v| = 1 within 1e-12.
  explicit Direction(Vector v);
  static Direction normalized(const Vector& v);
  static Direction from_angle(double theta);
  static Direction axis(int d, int index);

  int dim() const { return static_cast<int>(v_.size()); }
  const Vector& vec() const { return v_; }
  double operator()(int i) const { return v_(i); }
  double dot(const Eigen::Ref<const Vector>& x) const { return v_.dot(x); }
  Direction operator-() const { return Direction(Vector(-v_)); }

 private:
  Vector v_;
};

/// H_{omega,p} = {x : x . omega < p}.
struct Halfspace {
  Direction omega;
  double p;

  bool contains(const Eigen::Ref<const Vector>& x) const { return omega.dot(x) < p; }
  /// The closure misses the origin iff p < 0.
  bool bounded_away_from_origin() const { return p < 0.0; }
};

/// L_{omega,p} = {x : x . omega = p}; (omega, p) and (-omega, -p) coincide.
struct Hyperplane {
  Direction omega;
  double p;

  /// Representative with first nonzero component of omega positive.
  Hyperplane canonical() const;
  bool same_as(const Hyperplane& other, double tol = 1e-12) const;
  double signed_distance(const Eigen::Ref<const Vector>& x) const { return omega.dot(x) - p; }
};

/// Dense samples on a uniform grid, d in {2, 3}. Node (i_0, ..., i_{d-1}) sits
/// at origin + spacing * i and is stored row-major (last axis fastest).
class GridDensity {
 public:
  GridDensity(int dim, std::vector<int> shape, Vector origin, double spacing,
              std::vector<double> samples);

  /// Samples f on the centered cube [-half_width, half_width]^d with n nodes per
  /// axis. With supersample > 1 each node holds the average of f over its cell
  /// on a supersample^d subgrid (anti-aliasing for discontinuous phantoms).
  template <class F>
  static GridDensity sample(int dim, int n, double half_width, F&& f, int supersample = 1);

  int dim() const { return dim_; }
  const std::vector<int>& shape() const { return shape_; }
  const Vector& origin() const { return origin_; }
  double spacing() const { return spacing_; }
  const std::vector<double>& samples() const { return samples_; }
  double support_radius() const { return support_radius_; }
  std::size_t size() const { return samples_.size(); }

  Vector node(std::size_t flat) const;
  /// Bilinear (d = 2) / trilinear (d = 3) interpolation; 0 outside the grid.
  double interpolate(const Eigen::Ref<const Vector>& x) const;
  /// Product trapezoid weight of a node (spacing^d times 1/2 per boundary axis).
  double weight(std::size_t flat) const;

 private:
  int dim_;
  std::vector<int> shape_;
  Vector origin_;
  double spacing_;
  std::vector<double> samples_;
  double support_radius_ = 0.0;
};

/// Finite signed combination of Dirac masses; points are columns.
struct AtomicMeasure {
  Matrix points;   // d x n
  Vector weights;  // n

  AtomicMeasure() = default;
  AtomicMeasure(Matrix pts, Vector w);
  static AtomicMeasure dirac(const Vector& a, double weight = 1.0);

  int dim() const { return static_cast<int>(points.rows()); }
  Eigen::Index size() const { return weights.size(); }
};

/// Non-negative atoms on S^{d-1}.
struct SpectralMeasure {
  Matrix atoms;    // d x n, unit columns
  Vector weights;  // n, >= 0

  SpectralMeasure() = default;
  SpectralMeasure(Matrix a, Vector w);
  static SpectralMeasure uniform(int d, int n, double total_mass = 1.0);

  int dim() const { return static_cast<int>(atoms.rows()); }
  Eigen::Index size() const { return weights.size(); }
  double total_mass() const { return weights.sum(); }
};

/// Closed-form angular density u(omega):
///  constant: c0;  harmonic (d = 2): c0 + a cos(n theta) + b sin(n theta);
///  zonal (d = 3): c0 + a P_n(omega_3).
struct AngularDensity {
  enum class Kind { constant, harmonic, zonal };
  Kind kind = Kind::constant;
  int dim = 2;
  int order = 0;
  double c0 = 1.0;
  double a = 0.0;
  double b = 0.0;

  static AngularDensity constant(int d, double c);
  static AngularDensity harmonic(int n, double a, double b = 0.0, double c0 = 0.0);
  static AngularDensity zonal(int n, double a, double c0 = 0.0);

  double operator()(const Eigen::Ref<const Vector>& omega) const;
  double sup_abs() const;
};

using AngularPart = std::variant<SpectralMeasure, AngularDensity>;

/// Homogeneous measure of degree alpha on R^d \ {0}, optionally restricted to
/// |x| > inner_cutoff. With beta = -alpha - d the two angular conventions are
///  - AngularDensity u: density f(r omega) = r^alpha u(omega) against dx;
///  - SpectralMeasure S: mu({|x| > s, x/|x| in A}) = s^{-beta} S(A), i.e.
///    mu = beta r^{-beta-1} dr S(d theta).
/// A unit-mass S with inner_cutoff 1 is the radial Pareto law of index beta.
struct PolarHomogeneous {
  int dim = 2;
  double degree = -3.0;
  AngularPart angular = AngularDensity::constant(2, 1.0);
  double inner_cutoff = 0.0;

  double beta() const { return -degree - dim; }
};

enum class Formula {
  gaussian,           // params: sigma, center[d]
  ball_indicator,     // params: radius, center[d]
  bump,               // params: radius, amplitude, center[d]
  cone_gaussian,      // params: sigma, delta, center[d]; times 1{x_d >= delta |x'|}
  inverse_zk,         // d = 2, params: k, part (0 real, 1 imaginary) of 1/(x1 + i x2)^k
  meanzero_homog,     // d = 2: params n, a, b:  r^-2 (a cos n theta + b sin n theta)
                      // d = 3: params n, a:     a r^-3 P_n(x3 / r)
  derivative_trick,   // d^beta of `base`, multi_index = beta, |beta| <= 2
  proposition_g,      // d = 2, params: m, C, oscillate (0/1)
  derivative_blowup,  // d = 1, params: k;  k^2 f'(k x) with f a unit-mass bump
  halfspace_3d,       // d = 3 singular measure h(x') delta_0(x_3)
};

const char* to_string(Formula f);
Formula formula_from_string(const std::string& s);

/// Closed-form density. Singular formulas (homogeneous ones) are evaluated only
/// away from the origin.
struct AnalyticDensity {
  Formula formula = Formula::gaussian;
  int dim = 2;
  std::vector<double> params;
  std::vector<int> multi_index;
  std::shared_ptr<const AnalyticDensity> base;

  static AnalyticDensity gaussian(int d, double sigma = 1.0, Vector center = {});
  static AnalyticDensity ball_indicator(int d, double radius = 1.0, Vector center = {});
  static AnalyticDensity bump(const BumpFunction& b);
  static AnalyticDensity cone_gaussian(int d, double sigma, double delta, Vector center);
  static AnalyticDensity derivative_blowup(double k);
  static AnalyticDensity inverse_zk(int k, bool imaginary = false);
  static AnalyticDensity meanzero_homog_2d(int n, double a, double b = 0.0);
  static AnalyticDensity meanzero_homog_3d(int n, double a);
  static AnalyticDensity derivative_trick(const AnalyticDensity& base, std::vector<int> beta);
  static AnalyticDensity proposition_g(int m, double C, bool oscillate = true);
  static AnalyticDensity halfspace_3d();

  double operator()(const Eigen::Ref<const Vector>& x) const;
  /// Trace density h(x') of the halfspace_3d model.
  double trace(const Eigen::Ref<const Vector>& x_prime) const;

  bool singular_at_origin() const;
  /// Degree of homogeneity for homogeneous formulas.
  std::optional<double> homogeneity_degree() const;
  /// Closed ball containing the support; radius is +inf for unbounded support.
  Vector support_center() const;
  double support_radius() const;
  /// Radius about the origin of effective_ball(*this).
  double effective_radius() const;
  /// Upper bound of |f| on the unit sphere (homogeneous formulas).
  double unit_sphere_sup() const;
  /// Parameters at which a line restricted to the density has a jump.
  std::vector<double> line_breakpoints(const Vector& point, const Vector& direction) const;
};

/// Ball outside which an analytic density vanishes or is below 1e-30 of its
/// peak; radius +inf when there is no such ball (homogeneous formulas).
struct EffectiveBall {
  Vector center;
  double radius;
};
EffectiveBall effective_ball(const AnalyticDensity& f);

using MeasureModel = std::variant<GridDensity, AtomicMeasure, PolarHomogeneous, AnalyticDensity>;

int dim(const MeasureModel& m);

/// Node counts for polar quadratures: radial composite Gauss-Legendre
/// (radial_panels x order) and angular rule size.
struct QuadratureSettings {
  int radial_panels = 16;
  int order = 16;
  int angular_nodes = 128;
};

/// <mu, phi>. Throws SupportTouchesSingularity when supp phi reaches a
/// singularity of mu, NonFinite if the quadrature diverges.
double eval_measure_pairing(const MeasureModel& m, const TestFunction& phi,
                            const QuadratureSettings& q = {});

/// Total variation of mu restricted to R^d minus the closed ball B_eps.
double total_variation(const MeasureModel& m, double exclusion_radius,
                       const QuadratureSettings& q = {});

/// Signed total mass <mu, 1> (finite measures only).
double total_mass(const MeasureModel& m, const QuadratureSettings& q = {});

// ---------------------------------------------------------------------------

template <class F>
GridDensity GridDensity::sample(int dim, int n, double half_width, F&& f, int supersample) {
  require(dim == 2 || dim == 3, ErrorCode::BadParams, "grids support d = 2 or d = 3");
  require(n >= 2, ErrorCode::BadParams, "grid needs at least 2 nodes per axis");
  const double h = 2.0 * half_width / (n - 1);
  const Vector origin = Vector::Constant(dim, -half_width);
  std::size_t total = 1;
  for (int k = 0; k < dim; ++k) total *= static_cast<std::size_t>(n);
  std::vector<double> values(total);
  const int ss = std::max(1, supersample);
  Vector x(dim), y(dim);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (int k = dim - 1; k >= 0; --k) {
      x(k) = origin(k) + h * static_cast<double>(rest % n);
      rest /= n;
    }
    if (ss == 1) {
      values[flat] = f(x);
      continue;
    }
    double acc = 0.0;
    int count = 0;
    std::vector<int> idx(dim, 0);
    while (true) {
      for (int k = 0; k < dim; ++k) y(k) = x(k) + h * ((idx[k] + 0.5) / ss - 0.5);
      acc += f(y);
      ++count;
      int k = 0;
      while (k < dim && ++idx[k] == ss) idx[k++] = 0;
      if (k == dim) break;
    }
    values[flat] = acc / count;
  }
  return GridDensity(dim, std::vector<int>(dim, n), origin, h, std::move(values));
}

}  // namespace exradon
