#pragma once

#include "exradon/core.hpp"

namespace exradon {

/// Surface area of the unit sphere S^{d-1} in R^d (2 for d = 1).
double sphere_area(int d);

/// Uniform direction sets: d = 2 equiangular theta_j = 2 pi j / n; d = 3
/// Fibonacci sphere. Columns are unit vectors.
Matrix equiangular_directions(int n, double offset = 0.0);
Matrix fibonacci_directions(int n);
Matrix uniform_directions(int d, int n);

/// Quadrature on S^{d-1}; weights integrate against the unnormalized surface
/// measure (divide by sphere_area(d) for the normalized one).
struct SphereRule {
  Matrix nodes;    // d x n
  Vector weights;  // n

  Eigen::Index size() const { return weights.size(); }
};

/// Full-sphere rule: d = 1 two points, d = 2 periodic trapezoid with n nodes,
/// d = 3 Gauss-Legendre in cos(theta) (n) times trapezoid in azimuth (2n).
SphereRule sphere_rule(int d, int n);

/// Rule over the cap {theta : angle(theta, axis) <= half_angle}; falls back
/// to sphere_rule when the cap is the whole sphere.
SphereRule cap_rule(const Vector& axis, double half_angle, int n);

/// Orthonormal basis of omega^perp as columns (d x (d-1)). Gram-Schmidt over
/// standard basis vectors ordered by |omega_i| ascending, ties by axis index.
Matrix orthonormal_complement(const Vector& omega);

}  // namespace exradon
