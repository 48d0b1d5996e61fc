#include "exradon/quadrature.hpp"

#include <map>
#include <mutex>

namespace exradon {

namespace {

struct Reference {
  std::vector<double> x;
  std::vector<double> w;
};

// Newton iteration on P_n from the Tricomi initial guesses.
Reference compute_reference(int n) {
  Reference ref;
  ref.x.resize(n);
  ref.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    ref.x[n - 1 - i] = x;
    ref.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return ref;
}

const Reference& reference(int n) {
  static std::mutex mutex;
  static std::map<int, Reference> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_reference(n)).first;
  return it->second;
}

}  // namespace

void Rule1D::append(const Rule1D& other) {
  nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

Rule1D gauss_legendre(int order, double a, double b) {
  require(order >= 1, ErrorCode::BadParams, "Gauss-Legendre order must be >= 1");
  const Reference& ref = reference(order);
  Rule1D rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < order; ++i) {
    rule.nodes[i] = mid + half * ref.x[i];
    rule.weights[i] = half * ref.w[i];
  }
  return rule;
}

Rule1D composite_gauss(double a, double b, int panels, int order) {
  Rule1D rule;
  if (!(b > a) || panels < 1) return rule;
  const double h = (b - a) / panels;
  for (int k = 0; k < panels; ++k) rule.append(gauss_legendre(order, a + k * h, a + (k + 1) * h));
  return rule;
}

Rule1D graded_toward_left(double a, double b, double resolution, int levels, int order) {
  Rule1D rule;
  if (!(b > a)) return rule;
  const double len = b - a;
  const double inner = std::min(resolution, len);
  // uniform part
  if (len > inner) {
    const int panels = static_cast<int>(std::ceil((len - inner) / resolution));
    rule.append(composite_gauss(a + inner, b, panels, order));
  }
  double hi = a + inner;
  for (int level = 0; level < levels; ++level) {
    const double lo = a + (hi - a) * 0.5;
    rule.append(gauss_legendre(order, lo, hi));
    hi = lo;
    if (hi - a <= 1e-300) break;
  }
  return rule;
}

Rule1D geometric_outward(double a, double inner, double cutoff, double resolution, int order) {
  Rule1D rule;
  if (!(cutoff > a)) return rule;
  const double first = std::min(a + inner, cutoff);
  const int panels = std::max(1, static_cast<int>(std::ceil((first - a) / resolution)));
  rule.append(composite_gauss(a, first, panels, order));
  double lo = first;
  double width = std::max(resolution, first - a);
  while (lo < cutoff) {
    const double hi = std::min(cutoff, lo + width);
    rule.append(gauss_legendre(order, lo, hi));
    lo = hi;
    width *= 2.0;
  }
  return rule;
}

std::vector<double> trapezoid_weights(std::size_t n, double h) {
  std::vector<double> w(n, h);
  if (n >= 1) w.front() *= 0.5;
  if (n >= 2) w.back() *= 0.5;
  if (n == 1) w[0] = h;
  return w;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
  return out;
}

}  // namespace exradon
