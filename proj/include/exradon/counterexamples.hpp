#pragma once

#include "exradon/model.hpp"
#include "exradon/radon.hpp"

#include <optional>
#include <vector>

namespace exradon {

enum class InvisibleKind { inverse_zk, meanzero_homog, derivative_trick, halfspace_supported_3d };

const char* to_string(InvisibleKind k);
InvisibleKind invisible_kind_from_string(const std::string& s);

struct InvisibleParams {
  int dim = 2;
  int k = 2;               // inverse_zk: power; must be >= 2
  bool imaginary = false;  // inverse_zk: imaginary part instead of real part
  int n = 2;               // meanzero_homog: angular order (even, >= 2)
  double a = 1.0;          // meanzero_homog: cos / Legendre coefficient
  double b = 0.0;          // meanzero_homog (d = 2): sin coefficient
  std::optional<AnalyticDensity> base;  // derivative_trick: invisible base, default Re(1/z^2)
  std::vector<int> beta;                // derivative_trick: multi-index, |beta| <= 2
};

/// Closed-form density whose integral over every hyperplane missing the
/// origin vanishes. halfspace_supported_3d is the trace measure h(x') delta_0(x_3).
AnalyticDensity make_invisible(InvisibleKind kind, const InvisibleParams& params = {});

/// Random hyperplanes with |p| uniform in [p_min, p_max] and random sign.
std::vector<Hyperplane> random_hyperplanes(int d, std::size_t n, double p_min, double p_max, std::uint64_t seed);
/// Random halfspaces with p uniform in [p_lo, p_hi].
std::vector<Halfspace> random_halfspaces(int d, std::size_t n, double p_lo, double p_hi, std::uint64_t seed);

struct LineCertificate {
  std::vector<double> values;
  std::vector<double> scales;  // A |p|^{-k} from the decay envelope, 1 without one
  double max_abs = 0.0;
  double max_relative = 0.0;   // max |value| / scale
  double max_tail_ratio = 0.0; // max tail_bound / scale
};

/// Hyperplane integrals over `lines`; each needs |p| >= p_min.
LineCertificate certify_invisible(const AnalyticDensity& f, const std::vector<Hyperplane>& lines, double p_min = 0.1,
                                  const RadonSettings& s = {});

/// max |mu(H)| over halfspaces for the trace measure of halfspace_supported_3d;
/// with absolute = true the trace |h| is used instead (negative control).
double certify_halfspace_invisible_3d(const std::vector<Halfspace>& halfspaces, bool absolute = false,
                                      int angular_nodes = 256);

/// div(f(x) x) = d f + x . grad f, with the gradient by automatic differentiation.
double radial_field_divergence(const AnalyticDensity& f, const Vector& x);

/// g = q h + C |x|^{-m-2} 1{|x| > 1} on R^2 with h = d_{x1}^m Re(1/z^2)
/// (degree -2-m, vanishing on |x| < 1) and q(x) = 2 sin(log log |x|) for
/// |x| > e, 0 otherwise.
struct PropositionG {
  int m = 1;
  double C = 0.0;
  bool oscillate = true;

  /// C = 2 sup_{|x| = 1} |h|, from a fine sample of the unit circle.
  static PropositionG make(int m, bool oscillate = true);

  /// h on the unit circle, extended homogeneously: h(theta) for |theta| = 1.
  double h_unit(double angle) const;
  double h(const Vector& x) const;
  /// q evaluated from log|x| so that huge radii never overflow.
  double q_from_log(double log_r) const;
  double g(const Vector& x) const;
  /// |grad q(x)| |x| = 2 |cos(log log r)| / log r for r > e.
  double q_gradient_times_radius(double r) const;

  AnalyticDensity density() const { return AnalyticDensity::proposition_g(m, C, oscillate); }
};

enum class ScanMode { halfspace, testfn };

struct ScanPoint {
  double log_t;
  double value;     // t^{m+2} <g(t .), phi>  or  t^{m+2} int_H g(t x) dx
  double baseline;  // contribution of C |x|^{-m-2}
};

struct ScanRequest {
  ScanMode mode = ScanMode::halfspace;
  std::optional<Halfspace> halfspace;
  std::optional<BumpFunction> phi;
  int angular_nodes = 512;
};

/// The t^{m+2}-scaled functionals of g(t .) at t = exp(log_t), evaluated in
/// log space. Throws TOverflow if log_t <= 1 (t <= e) or is not finite.
std::vector<ScanPoint> scan_limits(const PropositionG& g, const ScanRequest& req, const std::vector<double>& log_t);

/// log t with log log t = phase + 2 pi j.
double log_t_for_phase(double phase, int j = 0);

}  // namespace exradon
