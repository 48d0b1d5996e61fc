#include "exradon/sphere.hpp"

#include "exradon/quadrature.hpp"

#include <algorithm>
#include <numeric>

namespace exradon {

double sphere_area(int d) {
  require(d >= 1, ErrorCode::BadParams, "dimension must be >= 1");
  return 2.0 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d);
}

Matrix equiangular_directions(int n, double offset) {
  Matrix out(2, n);
  for (int j = 0; j < n; ++j) {
    const double t = offset + 2.0 * pi * j / n;
    out(0, j) = std::cos(t);
    out(1, j) = std::sin(t);
  }
  return out;
}

Matrix fibonacci_directions(int n) {
  Matrix out(3, n);
  const double golden = pi * (3.0 - std::sqrt(5.0));
  for (int j = 0; j < n; ++j) {
    const double z = 1.0 - (2.0 * j + 1.0) / n;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * j;
    out(0, j) = rho * std::cos(phi);
    out(1, j) = rho * std::sin(phi);
    out(2, j) = z;
  }
  return out;
}

Matrix uniform_directions(int d, int n) {
  switch (d) {
    case 1: {
      Matrix out(1, 2);
      out << 1.0, -1.0;
      return out;
    }
    case 2:
      return equiangular_directions(n);
    case 3:
      return fibonacci_directions(n);
    default:
      throw Error(ErrorCode::BadParams, "uniform direction sets exist only for d <= 3");
  }
}

namespace {

// Rotation taking e_d to axis (d = 3): columns are an orthonormal frame whose
// last column is the axis.
Matrix frame_with_last(const Vector& axis) {
  const Matrix perp = orthonormal_complement(axis);
  Matrix frame(axis.size(), axis.size());
  frame.leftCols(axis.size() - 1) = perp;
  frame.col(axis.size() - 1) = axis;
  return frame;
}

}  // namespace

SphereRule sphere_rule(int d, int n) {
  SphereRule rule;
  if (d == 1) {
    rule.nodes = uniform_directions(1, 2);
    rule.weights = Vector::Ones(2);
    return rule;
  }
  if (d == 2) {
    rule.nodes = equiangular_directions(n);
    rule.weights = Vector::Constant(n, 2.0 * pi / n);
    return rule;
  }
  require(d == 3, ErrorCode::BadParams, "sphere rules exist only for d <= 3");
  const Rule1D polar = gauss_legendre(n, -1.0, 1.0);
  const int m = 2 * n;
  rule.nodes.resize(3, n * m);
  rule.weights.resize(n * m);
  for (int i = 0; i < n; ++i) {
    const double z = polar.nodes[i], rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (int j = 0; j < m; ++j) {
      const double phi = 2.0 * pi * j / m;
      const int k = i * m + j;
      rule.nodes.col(k) << rho * std::cos(phi), rho * std::sin(phi), z;
      rule.weights(k) = polar.weights[i] * 2.0 * pi / m;
    }
  }
  return rule;
}

SphereRule cap_rule(const Vector& axis, double half_angle, int n) {
  const int d = static_cast<int>(axis.size());
  if (half_angle >= pi || d == 1) return sphere_rule(d, n);
  SphereRule rule;
  const Vector a = axis.normalized();
  if (d == 2) {
    const double center = std::atan2(a(1), a(0));
    const Rule1D arc = gauss_legendre(n, center - half_angle, center + half_angle);
    rule.nodes.resize(2, n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
      rule.nodes.col(i) << std::cos(arc.nodes[i]), std::sin(arc.nodes[i]);
      rule.weights(i) = arc.weights[i];
    }
    return rule;
  }
  require(d == 3, ErrorCode::BadParams, "cap rules exist only for d <= 3");
  const Matrix frame = frame_with_last(a);
  const Rule1D polar = gauss_legendre(n, std::cos(half_angle), 1.0);
  const int m = 2 * n;
  rule.nodes.resize(3, n * m);
  rule.weights.resize(n * m);
  for (int i = 0; i < n; ++i) {
    const double z = polar.nodes[i], rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (int j = 0; j < m; ++j) {
      const double phi = 2.0 * pi * j / m;
      const int k = i * m + j;
      Eigen::Vector3d local(rho * std::cos(phi), rho * std::sin(phi), z);
      rule.nodes.col(k) = frame * local;
      rule.weights(k) = polar.weights[i] * 2.0 * pi / m;
    }
  }
  return rule;
}

Matrix orthonormal_complement(const Vector& omega) {
  const Eigen::Index d = omega.size();
  std::vector<Eigen::Index> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(omega(a)) < std::abs(omega(b));
  });
  const Vector w = omega.normalized();
  Matrix basis(d, d - 1);
  Eigen::Index found = 0;
  for (Eigen::Index idx : order) {
    if (found == d - 1) break;
    Vector e = Vector::Unit(d, idx);
    e -= e.dot(w) * w;
    for (Eigen::Index k = 0; k < found; ++k) e -= e.dot(basis.col(k)) * basis.col(k);
    const double nrm = e.norm();
    if (nrm < 1e-8) continue;
    basis.col(found++) = e / nrm;
  }
  return basis;
}

}  // namespace exradon
