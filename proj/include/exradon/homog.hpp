#pragma once

#include "exradon/bump.hpp"
#include "exradon/model.hpp"

#include <array>
#include <functional>
#include <vector>

namespace exradon {

/// k-fold primitive of the half-line power x_+^e used to extend it across 0.
/// `k` is the least non-negative integer with k + e > -1. For non-integral e
/// the primitive is c x_+^{k+e} with c (e+1)...(e+k) = 1; for a negative
/// integer e it is c log x (k = -e), which breaks homogeneity.
struct HalflinePower {
  double gamma = 0.0;     // degree of the original function
  int dim = 1;            // 1 for R, d for r^gamma on R^d in polar form
  double exponent = 0.0;  // e = gamma (d = 1) or gamma + d - 1
  int k = 0;
  double c = 1.0;
  bool logarithmic = false;

  static HalflinePower halfline(double gamma);
  static HalflinePower polar(double gamma, int d);

  /// F(x) for x > 0 (F vanishes on x < 0).
  double primitive(double x) const;
};

/// Derivatives phi^{(j)}(x), j = 0..3, of a test function on the line.
using Jet1D = std::function<std::array<double, 4>(double)>;

/// (-1)^k int_0^inf (F(x) + sum_j poly_j x^j) phi^{(k)}(x) dx for a test
/// function supported in [a, b]. Throws DerivativeOrderUnsupported if k > 3.
double halfline_pairing(const HalflinePower& hp, const Jet1D& phi, double a, double b,
                        const std::vector<double>& poly = {});

/// <x~_+^gamma, phi> for a bump on R.
double extend_halfline(double gamma, const BumpFunction& phi);

/// |<x~_+^gamma, phi(./lambda)> - lambda^{gamma+1} <x~_+^gamma, phi>|.
double homogeneity_defect(double gamma, const BumpFunction& phi, double lambda);

/// Pairing of the extension of the degree-gamma homogeneous measure with
/// angular part u (same conventions as PolarHomogeneous) with phi in R^d.
/// Throws IntegralDegree if gamma + d is a non-positive integer.
double extend_polar(const AngularPart& u, double gamma, const BumpFunction& phi,
                    const QuadratureSettings& q = {});

struct MomentSet {
  std::vector<std::vector<int>> indices;  // all multi-indices with |index| = m, lexicographic descending
  std::vector<double> values;             // int_{S^{d-1}} omega^index u(omega) d sigma (surface measure)

  double max_abs() const;
};

/// Sphere moments of order m; n is the resolution of the sphere rule.
MomentSet moment_condition(const AngularPart& u, int m, int n = 256);
MomentSet moment_condition(const std::function<double(const Vector&)>& u, int d, int m, int n = 256);

/// Multi-indices of R^d with |index| = m in the order used by MomentSet.
std::vector<std::vector<int>> multi_indices(int d, int m);

}  // namespace exradon
