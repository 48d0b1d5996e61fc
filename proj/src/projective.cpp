#include "exradon/projective.hpp"

#include "exradon/quadrature.hpp"
#include "exradon/sphere.hpp"

#include <Eigen/LU>
#include <algorithm>

namespace exradon {

bool ConeSpec::contains(const Eigen::Ref<const Vector>& x, double tol) const {
  const Eigen::Index n = x.size() - 1;
  return x(n) >= delta * x.head(n).norm() - tol;
}

ProjectiveMap::ProjectiveMap(Matrix h) : h_(std::move(h)) {
  require(h_.rows() == h_.cols() && h_.rows() >= 2, ErrorCode::BadParams, "projective matrix must be square, d >= 1");
  require(std::abs(h_.determinant()) > 1e-14, ErrorCode::BadParams, "projective matrix is singular");
}

ProjectiveMap ProjectiveMap::psi_inverse(int d) {
  Matrix h = Matrix::Identity(d + 1, d + 1);
  h(d, d - 1) = -1.0;
  return ProjectiveMap(std::move(h));
}

ProjectiveMap ProjectiveMap::affine(const Matrix& a, const Vector& b) {
  const Eigen::Index d = a.rows();
  Matrix h = Matrix::Identity(d + 1, d + 1);
  h.topLeftCorner(d, d) = a;
  h.topRightCorner(d, 1) = b;
  return ProjectiveMap(std::move(h));
}

double ProjectiveMap::point_factor(const Vector& y) const {
  return std::pow(std::abs(denominator<double>(y)), -dim());
}

bool cone_image_check(const ConeSpec& q, const Matrix& samples) {
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    const Vector y = psi_map(Vector(samples.col(j)));
    const Eigen::Index n = y.size() - 1;
    if (y(n) > 1.0 + 1e-12 || q.delta * y.head(n).norm() > y(n) + 1e-12) return false;
  }
  return true;
}

Vector sphere_lift(const Vector& x) {
  Vector out(x.size() + 1);
  out.head(x.size()) = x;
  out(x.size()) = 1.0;
  return out / std::sqrt(1.0 + x.squaredNorm());
}

double sphere_lift_jacobian(const Vector& x, double p) {
  const double d = static_cast<double>(x.size());
  return std::pow(1.0 + x.squaredNorm(), d / 2.0) / std::sqrt(1.0 + p * p);
}

double hyperplane_jacobian(const ProjectiveMap& to_x, const Hyperplane& l_tilde, const Vector& y) {
  const int d = to_x.dim();
  require(l_tilde.omega.dim() == d && y.size() == d, ErrorCode::BadParams, "dimension mismatch");
  const Matrix frame = orthonormal_complement(l_tilde.omega.vec());
  constexpr double h = 1e-30;
  Matrix pushed(d, d - 1);
  for (int i = 0; i < d - 1; ++i) {
    const VectorX<Complex> z = y.cast<Complex>() + Complex(0.0, h) * frame.col(i).cast<Complex>();
    pushed.col(i) = to_x(z).imag() / h;
  }
  return std::sqrt((pushed.transpose() * pushed).determinant());
}

double factorization_defect(const Hyperplane& l_tilde, const Matrix& ys, const ProjectiveMap& to_x) {
  require(ys.cols() >= 1, ErrorCode::BadParams, "need at least one sample point");
  double lo = kInf, hi = 0.0;
  for (Eigen::Index j = 0; j < ys.cols(); ++j) {
    const Vector y = ys.col(j);
    require(std::abs(l_tilde.signed_distance(y)) < 1e-9, ErrorCode::BadParams, "sample is not on the hyperplane");
    const double r = hyperplane_jacobian(to_x, l_tilde, y) / to_x.point_factor(y);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return hi / lo - 1.0;
}

double factorization_defect(const Hyperplane& l_tilde, const Matrix& ys) {
  return factorization_defect(l_tilde, ys, ProjectiveMap::psi_inverse(l_tilde.omega.dim()));
}

Hyperplane psi_image(const Hyperplane& l) {
  const int d = l.omega.dim();
  Vector n = l.omega.vec();
  n(d - 1) += l.p;
  const double len = n.norm();
  require(len > 1e-12, ErrorCode::PoleHit, "the pole plane has no image");
  return {Direction(Vector(n / len)), l.p / len};
}

namespace {

struct DensityView {
  std::function<double(const Vector&)> eval;
  Vector center;
  double radius;
  std::function<std::vector<double>(const Vector&, const Vector&)> breaks;
  int panels;
  int order;
};

DensityView view_of(const MeasureModel& m) {
  if (const auto* g = std::get_if<GridDensity>(&m)) {
    const double reach = g->support_radius() + g->spacing() * std::sqrt(2.0);
    const double h = g->spacing();
    const int panels = std::max(16, static_cast<int>(std::ceil(2.0 * reach / h)));
    return {[g](const Vector& x) { return g->interpolate(x); }, Vector::Zero(2), reach, {}, panels, 4};
  }
  const auto* f = std::get_if<AnalyticDensity>(&m);
  require(f != nullptr, ErrorCode::BadParams, "projective reduction needs a grid or analytic density");
  require(!f->singular_at_origin(), ErrorCode::BadParams, "projective reduction needs a density without singularities");
  const EffectiveBall ball = effective_ball(*f);
  require(std::isfinite(ball.radius), ErrorCode::BadParams, "projective reduction needs an effectively bounded density");
  return {[f](const Vector& x) { return (*f)(x); }, ball.center, ball.radius,
          [f](const Vector& a, const Vector& v) { return f->line_breakpoints(a, v); }, 32, 16};
}

// y-space side for one hyperplane L in x-space.
double y_side(const DensityView& v, const Hyperplane& l) {
  const Vector& w = l.omega.vec();
  const Vector dir(Vector(Eigen::Vector2d(-w(1), w(0))));
  const Vector foot = l.p * w;
  // chord of L through the effective ball, clipped to x_2 >= 0
  const double t = dir.dot(v.center - foot);
  const double dist2 = (foot + t * dir - v.center).squaredNorm();
  if (dist2 >= v.radius * v.radius) return 0.0;
  double s0 = t - std::sqrt(v.radius * v.radius - dist2), s1 = t + std::sqrt(v.radius * v.radius - dist2);
  if (std::abs(dir(1)) > 1e-14) {
    const double s_axis = -foot(1) / dir(1);
    if (dir(1) > 0.0)
      s0 = std::max(s0, s_axis);
    else
      s1 = std::min(s1, s_axis);
  } else if (foot(1) < 0.0) {
    return 0.0;
  }
  if (!(s1 > s0)) return 0.0;
  const Hyperplane lt = psi_image(l);
  const Vector& wt = lt.omega.vec();
  const Vector dt(Vector(Eigen::Vector2d(-wt(1), wt(0))));
  const Vector foot_t = lt.p * wt;
  auto t_of = [&](double s) { return dt.dot(psi_map(Vector(foot + s * dir)) - foot_t); };
  std::vector<double> cuts{t_of(s0), t_of(s1)};
  if (v.breaks)
    for (double s : v.breaks(foot, dir))
      if (s > s0 && s < s1) cuts.push_back(t_of(s));
  std::sort(cuts.begin(), cuts.end());
  const double j0 = 1.0 / (w + l.p * Vector::Unit(2, 1)).norm();
  const ProjectiveMap to_x = ProjectiveMap::psi_inverse(2);
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (!(cuts[k + 1] > cuts[k])) continue;
    const Rule1D rule = composite_gauss(cuts[k], cuts[k + 1], v.panels, v.order);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const Vector y = foot_t + rule.nodes[i] * dt;
      acc += rule.weights[i] * v.eval(psi_inverse(y)) * to_x.point_factor(y);
    }
  }
  return j0 * acc;
}

}  // namespace

RadonDataPair transform_radon_data(const MeasureModel& m, const SinogramSampling& s, const RadonSettings& rs) {
  require(dim(m) == 2 && s.dim == 2, ErrorCode::BadParams, "projective reduction is implemented for d = 2");
  RadonDataPair out;
  out.x_space = radon_forward(m, s, rs);
  out.y_space = out.x_space;
  const DensityView v = view_of(m);
  const std::vector<double> ps = out.x_space.offsets;
  const Matrix& dirs = out.x_space.directions;
  parallel_for(static_cast<std::size_t>(dirs.cols()), rs.threads, [&](std::size_t i) {
    const Direction w(Vector(dirs.col(static_cast<Eigen::Index>(i))));
    for (std::size_t j = 0; j < ps.size(); ++j)
      out.y_space.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = y_side(v, {w, ps[j]});
  });
  out.max_abs_diff = (out.x_space.values - out.y_space.values).cwiseAbs().maxCoeff();
  const double scale = out.x_space.values.cwiseAbs().maxCoeff();
  out.rel_diff = scale > 0.0 ? out.max_abs_diff / scale : out.max_abs_diff;
  return out;
}

}  // namespace exradon
