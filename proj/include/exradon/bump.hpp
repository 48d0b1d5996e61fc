#pragma once

#include "exradon/core.hpp"

#include <array>
#include <vector>

namespace exradon {

/// Canonical mollifier profile g(t) = exp(-1/(1-t)) for t < 1, 0 otherwise,
/// evaluated with its first three derivatives in t. The ball bump is
/// g(|x-c|^2 / R^2), i.e. exp(-1/(1-s^2)) in the normalized radius s.
std::array<double, 4> mollifier_jet(double t);

/// Smooth compactly supported test function
///   phi(x) = amplitude * exp(-1 / (1 - s^2)),  |s| < 1,
/// with s = |x - center| / radius for a ball bump, or
/// s = (|x - center| - shell_radius) / radius for a shell bump (an annulus
/// around the center).
class BumpFunction {
 public:
  BumpFunction(Vector center, double radius, double amplitude = 1.0, double shell_radius = 0.0);

  /// One-dimensional bump on the real line.
  static BumpFunction on_line(double center, double radius, double amplitude = 1.0);

  int dim() const { return static_cast<int>(center_.size()); }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }
  double amplitude() const { return amplitude_; }
  double shell_radius() const { return shell_radius_; }
  bool is_shell() const { return shell_radius_ > 0.0; }

  /// Radius of the smallest ball around center() containing the support.
  double outer_radius() const { return shell_radius_ + radius_; }
  /// Distance from the origin to the support (0 if the support contains it).
  double distance_to_origin() const;

  double operator()(const Eigen::Ref<const Vector>& x) const;
  double operator()(double x) const;  // d = 1 only

  /// d^j/dr^j phi(x0 + r v) at r, for j = 0..3; v need not be unit.
  std::array<double, 4> derivatives_along(const Eigen::Ref<const Vector>& x0,
                                          const Eigen::Ref<const Vector>& v, double r) const;
  /// phi^{(j)}(x), j = 0..3, for d = 1.
  std::array<double, 4> derivatives(double x) const;

  /// phi(. / lambda): support scaled about the origin.
  BumpFunction scaled(double lambda) const;

 private:
  Vector center_;
  double radius_;
  double amplitude_;
  double shell_radius_;
};

/// Finite linear combination of bumps; the argument type of every pairing.
class TestFunction {
 public:
  struct Term {
    double coefficient;
    BumpFunction bump;
  };

  TestFunction(const BumpFunction& bump) : terms_{{1.0, bump}} {}  // NOLINT: implicit on purpose
  explicit TestFunction(std::vector<Term> terms);

  int dim() const { return terms_.front().bump.dim(); }
  const std::vector<Term>& terms() const { return terms_; }

  double operator()(const Eigen::Ref<const Vector>& x) const;
  std::array<double, 4> derivatives_along(const Eigen::Ref<const Vector>& x0,
                                          const Eigen::Ref<const Vector>& v, double r) const;

  /// Ball containing all supports.
  Vector bounding_center() const;
  double bounding_radius() const;
  double distance_to_origin() const;
  double sup_norm_bound() const;

  TestFunction scaled(double lambda) const;
  TestFunction operator*(double a) const;
  TestFunction operator+(const TestFunction& other) const;

 private:
  std::vector<Term> terms_;
};

}  // namespace exradon
