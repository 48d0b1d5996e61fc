#pragma once

#include "exradon/core.hpp"

#include <functional>
#include <vector>

namespace exradon {

/// Nodes and weights of a one-dimensional rule; weights include the interval
/// length, so `sum_i w_i f(x_i)` approximates the integral directly.
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  void append(const Rule1D& other);

  template <class F>
  auto integrate(F&& f) const -> decltype(f(0.0)) {
    using R = decltype(f(0.0));
    R acc{};
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

/// Gauss-Legendre rule with `order` nodes on [a, b]. Reference nodes are
/// cached per order.
Rule1D gauss_legendre(int order, double a = -1.0, double b = 1.0);

/// `panels` equal Gauss-Legendre panels on [a, b].
Rule1D composite_gauss(double a, double b, int panels, int order = 16);

/// Composite rule whose panels shrink geometrically (ratio 1/2) towards `a`,
/// for integrands with an integrable power or logarithmic singularity at `a`.
/// Panels inside [a + resolution, b] are uniform with width <= resolution.
Rule1D graded_toward_left(double a, double b, double resolution, int levels = 80,
                          int order = 16);

/// Panels uniform on [a, a + inner] (width <= resolution) then doubling in
/// width until `cutoff`; suited to algebraically decaying integrands.
Rule1D geometric_outward(double a, double inner, double cutoff, double resolution,
                         int order = 16);

/// Trapezoid weights on a uniform grid of n points with spacing h.
std::vector<double> trapezoid_weights(std::size_t n, double h);

/// Uniform grid of n points on [a, b] including both ends.
std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace exradon
