#pragma once

#include "exradon/model.hpp"
#include "exradon/radon.hpp"

#include <utility>

namespace exradon {

inline constexpr double kPoleClearance = 1e-3;

/// Q = {x : x_d >= delta |x'|}.
struct ConeSpec {
  double delta = 1.0;

  bool contains(const Eigen::Ref<const Vector>& x, double tol = 0.0) const;
};

/// y = x / (1 + x_d). Throws PoleHit when |1 + x_d| <= kPoleClearance.
template <class S>
VectorX<S> psi_map(const VectorX<S>& x) {
  const S den = S(1) + x(x.size() - 1);
  require(std::abs(den) > kPoleClearance, ErrorCode::PoleHit, "x_d = -1 is the pole of the projective map");
  return x / den;
}

/// x = y / (1 - y_d). Throws PoleHit when |1 - y_d| <= kPoleClearance.
template <class S>
VectorX<S> psi_inverse(const VectorX<S>& y) {
  const S den = S(1) - y(y.size() - 1);
  require(std::abs(den) > kPoleClearance, ErrorCode::PoleHit, "y_d = 1 is the image of infinity");
  return y / den;
}

inline Vector psi_map(const Vector& x) { return psi_map<double>(x); }
inline Vector psi_inverse(const Vector& y) { return psi_inverse<double>(y); }

/// Projective map x = (A y + b) / (c . y + e) written as a (d+1)x(d+1) matrix
/// [[A, b], [c^T, e]] acting on homogeneous coordinates.
class ProjectiveMap {
 public:
  explicit ProjectiveMap(Matrix h);
  /// psi_inverse: y -> y / (1 - y_d).
  static ProjectiveMap psi_inverse(int d);
  static ProjectiveMap affine(const Matrix& a, const Vector& b);

  int dim() const { return static_cast<int>(h_.rows()) - 1; }
  const Matrix& matrix() const { return h_; }

  template <class S>
  VectorX<S> operator()(const VectorX<S>& y) const {
    const int d = dim();
    VectorX<S> num = h_.topLeftCorner(d, d).cast<S>() * y + h_.topRightCorner(d, 1).cast<S>();
    const S den = denominator(y);
    require(std::abs(den) > kPoleClearance, ErrorCode::PoleHit, "point maps to infinity");
    return num / den;
  }
  template <class S>
  S denominator(const VectorX<S>& y) const {
    const int d = dim();
    return (h_.bottomLeftCorner(1, d).cast<S>() * y)(0) + S(h_(d, d));
  }
  /// Point factor of the hyperplane Jacobian, |c . y + e|^{-d}.
  double point_factor(const Vector& y) const;

 private:
  Matrix h_;
};

/// True iff each column x of `samples` maps to delta |y'| <= y_d <= 1 (1e-12).
bool cone_image_check(const ConeSpec& q, const Matrix& samples);

/// (x, 1) / sqrt(1 + |x|^2) on the upper half of S^d.
Vector sphere_lift(const Vector& x);

/// ds_L / ds_{lift(L)} at x on the hyperplane x . omega = p.
double sphere_lift_jacobian(const Vector& x, double p);

/// Surface-measure ratio ds_x / ds_y of the map y -> x = to_x(y) at y on
/// L_tilde, from an orthonormal frame of L_tilde pushed forward by
/// complex-step differentiation.
double hyperplane_jacobian(const ProjectiveMap& to_x, const Hyperplane& l_tilde, const Vector& y);

/// max/min of J(L_tilde, y) / to_x.point_factor(y) over the columns of ys,
/// minus 1. Throws BadParams if a sample is off L_tilde.
double factorization_defect(const Hyperplane& l_tilde, const Matrix& ys, const ProjectiveMap& to_x);
double factorization_defect(const Hyperplane& l_tilde, const Matrix& ys);

/// Image of L = {x . omega = p} under psi_map: y . (omega + p e_d) = p,
/// normalized. Throws PoleHit when L is the pole plane x_d = -1.
Hyperplane psi_image(const Hyperplane& l);

struct RadonDataPair {
  Sinogram x_space;
  Sinogram y_space;
  double max_abs_diff = 0.0;
  double rel_diff = 0.0;  // max_abs_diff / max |x_space|
};

/// Rf(L) computed in x-space and as J0(L~) int_{L~} f~(y) J1(y) ds_y in
/// y-space, for d = 2 analytic or grid models supported in x_d >= 0.
RadonDataPair transform_radon_data(const MeasureModel& m, const SinogramSampling& s, const RadonSettings& rs = {});

}  // namespace exradon
