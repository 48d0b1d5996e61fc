#include "exradon/bump.hpp"

#include <algorithm>

namespace exradon {

std::array<double, 4> mollifier_jet(double t) {
  if (t >= 1.0) return {0.0, 0.0, 0.0, 0.0};
  const double u = 1.0 / (1.0 - t);
  const double g = std::exp(-u);
  if (g == 0.0) return {0.0, 0.0, 0.0, 0.0};
  const double u2 = u * u, u3 = u2 * u, u4 = u2 * u2;
  return {g, -u2 * g, (u4 - 2.0 * u3) * g, (-u4 * u2 + 6.0 * u4 * u - 6.0 * u4) * g};
}

BumpFunction::BumpFunction(Vector center, double radius, double amplitude, double shell_radius)
    : center_(std::move(center)), radius_(radius), amplitude_(amplitude), shell_radius_(shell_radius) {
  require(center_.size() >= 1, ErrorCode::BadParams, "bump center must have dimension >= 1");
  require(radius_ > 0.0 && std::isfinite(radius_), ErrorCode::BadParams, "bump radius must be positive");
  require(shell_radius_ == 0.0 || shell_radius_ > radius_, ErrorCode::BadParams,
          "shell bump needs shell_radius > radius");
}

BumpFunction BumpFunction::on_line(double center, double radius, double amplitude) {
  Vector c(1);
  c(0) = center;
  return BumpFunction(std::move(c), radius, amplitude);
}

double BumpFunction::distance_to_origin() const {
  const double dc = center_.norm();
  if (!is_shell()) return std::max(0.0, dc - radius_);
  // annulus {rho - R <= |x - c| <= rho + R}
  if (dc > shell_radius_ + radius_) return dc - shell_radius_ - radius_;
  if (dc < shell_radius_ - radius_) return shell_radius_ - radius_ - dc;
  return 0.0;
}

double BumpFunction::operator()(const Eigen::Ref<const Vector>& x) const {
  const double dist = (x - center_).norm();
  const double s = is_shell() ? (dist - shell_radius_) / radius_ : dist / radius_;
  return amplitude_ * mollifier_jet(s * s)[0];
}

double BumpFunction::operator()(double x) const {
  const double s = (x - center_(0)) / radius_;
  return amplitude_ * mollifier_jet(s * s)[0];
}

std::array<double, 4> BumpFunction::derivatives_along(const Eigen::Ref<const Vector>& x0,
                                                      const Eigen::Ref<const Vector>& v,
                                                      double r) const {
  const Vector y = x0 + r * v - center_;
  const double r2 = radius_ * radius_;
  double q, q1, q2, q3;
  if (!is_shell()) {
    q = y.squaredNorm() / r2;
    if (q >= 1.0) return {0.0, 0.0, 0.0, 0.0};
    q1 = 2.0 * y.dot(v) / r2;
    q2 = 2.0 * v.squaredNorm() / r2;
    q3 = 0.0;
  } else {
    const double dist = y.norm();
    const double s = (dist - shell_radius_) / radius_;
    q = s * s;
    if (q >= 1.0) return {0.0, 0.0, 0.0, 0.0};
    const double d1 = y.dot(v) / dist;
    const double d2 = (v.squaredNorm() - d1 * d1) / dist;
    const double d3 = -3.0 * d1 * d2 / dist;
    const double s1 = d1 / radius_, s2 = d2 / radius_, s3 = d3 / radius_;
    q1 = 2.0 * s * s1;
    q2 = 2.0 * (s1 * s1 + s * s2);
    q3 = 2.0 * (3.0 * s1 * s2 + s * s3);
  }
  const auto g = mollifier_jet(q);
  const double a = amplitude_;
  return {a * g[0], a * g[1] * q1, a * (g[2] * q1 * q1 + g[1] * q2),
          a * (g[3] * q1 * q1 * q1 + 3.0 * g[2] * q1 * q2 + g[1] * q3)};
}

std::array<double, 4> BumpFunction::derivatives(double x) const {
  Vector x0 = Vector::Zero(1), v = Vector::Ones(1);
  return derivatives_along(x0, v, x);
}

BumpFunction BumpFunction::scaled(double lambda) const {
  require(lambda > 0.0, ErrorCode::BadParams, "scale factor must be positive");
  return BumpFunction(lambda * center_, lambda * radius_, amplitude_, lambda * shell_radius_);
}

TestFunction::TestFunction(std::vector<Term> terms) : terms_(std::move(terms)) {
  require(!terms_.empty(), ErrorCode::BadParams, "test function needs at least one term");
  for (const auto& t : terms_)
    require(t.bump.dim() == terms_.front().bump.dim(), ErrorCode::BadParams,
            "test function terms must share the dimension");
}

double TestFunction::operator()(const Eigen::Ref<const Vector>& x) const {
  double acc = 0.0;
  for (const auto& t : terms_) acc += t.coefficient * t.bump(x);
  return acc;
}

std::array<double, 4> TestFunction::derivatives_along(const Eigen::Ref<const Vector>& x0,
                                                      const Eigen::Ref<const Vector>& v,
                                                      double r) const {
  std::array<double, 4> acc{};
  for (const auto& t : terms_) {
    const auto d = t.bump.derivatives_along(x0, v, r);
    for (int j = 0; j < 4; ++j) acc[j] += t.coefficient * d[j];
  }
  return acc;
}

Vector TestFunction::bounding_center() const {
  if (terms_.size() == 1) return terms_.front().bump.center();
  Vector lo = terms_.front().bump.center(), hi = lo;
  for (const auto& t : terms_) {
    const Vector c = t.bump.center();
    const double r = t.bump.outer_radius();
    lo = lo.cwiseMin((c.array() - r).matrix());
    hi = hi.cwiseMax((c.array() + r).matrix());
  }
  return 0.5 * (lo + hi);
}

double TestFunction::bounding_radius() const {
  const Vector c = bounding_center();
  double r = 0.0;
  for (const auto& t : terms_) r = std::max(r, (t.bump.center() - c).norm() + t.bump.outer_radius());
  return r;
}

double TestFunction::distance_to_origin() const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& t : terms_) d = std::min(d, t.bump.distance_to_origin());
  return d;
}

double TestFunction::sup_norm_bound() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.coefficient * t.bump.amplitude()) * std::exp(-1.0);
  return s;
}

TestFunction TestFunction::scaled(double lambda) const {
  std::vector<Term> out;
  for (const auto& t : terms_) out.push_back({t.coefficient, t.bump.scaled(lambda)});
  return TestFunction(std::move(out));
}

TestFunction TestFunction::operator*(double a) const {
  std::vector<Term> out = terms_;
  for (auto& t : out) t.coefficient *= a;
  return TestFunction(std::move(out));
}

TestFunction TestFunction::operator+(const TestFunction& other) const {
  std::vector<Term> out = terms_;
  out.insert(out.end(), other.terms_.begin(), other.terms_.end());
  return TestFunction(std::move(out));
}

}  // namespace exradon
