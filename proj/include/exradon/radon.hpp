#pragma once

#include "exradon/model.hpp"
#include "exradon/quadrature.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace exradon {

/// Direction x offset sampling of a sinogram. Directions are uniform on
/// S^{d-1}: equiangular theta_j = 2 pi j / n in d = 2, Fibonacci in d = 3.
struct SinogramSampling {
  int dim = 2;
  int n_omega = 180;
  double p_min = -1.0;
  double p_max = 1.0;
  int n_p = 129;

  void validate() const;
  Matrix directions() const;
  std::vector<double> offsets() const;
  double p_step() const { return (p_max - p_min) / (n_p - 1); }
};

struct Sinogram {
  SinogramSampling sampling;
  Matrix directions;             // d x n_omega
  std::vector<double> offsets;   // n_p
  Matrix values;                 // n_omega x n_p

  /// Largest |R(w,p) - R(-w,-p)| over index pairs where both are sampled.
  double evenness_defect(double tol = 1e-9) const;
  /// Linear interpolation in p of row i; throws OffsetOutOfRange outside.
  double interpolate(Eigen::Index i, double p) const;
};

struct RadonSettings {
  double clearance = 1e-3;        // singular analytic densities need |p| > clearance
  double grid_step_factor = 0.5;  // line step relative to the grid spacing
  int order = 16;
  int angular_nodes = 128;        // in-plane angles for d = 3 plane integrals
  double tail_tolerance = 1e-9;   // relative to the natural scale A |p|^{-k}
  int threads = 1;
};

/// One hyperplane integral with the analytic bound on the truncated tail.
struct HyperplaneIntegral {
  double value = 0.0;
  double tail_bound = 0.0;
  double truncation = 0.0;  // T; +inf-free quadrature stops at |s| = T
};

/// |f(x)| <= amplitude |x|^{-decay} for |x| >= 1 (origin-singular or slowly
/// decaying analytic densities).
struct DecayEnvelope {
  double amplitude;
  double decay;
};
std::optional<DecayEnvelope> decay_envelope(const AnalyticDensity& f);

HyperplaneIntegral hyperplane_integral(const AnalyticDensity& f, const Hyperplane& L,
                                       const RadonSettings& s = {});
double hyperplane_integral(const GridDensity& g, const Hyperplane& L, const RadonSettings& s = {});

/// Rm(w, p) for grid or analytic m over the whole sampling.
Sinogram radon_forward(const MeasureModel& m, const SinogramSampling& sampling, const RadonSettings& s = {});

/// Push-forward pi_{w,*} mu as a 1-D measure: exact atoms for atomic input,
/// otherwise the density p -> Rm(w, p) sampled on quadrature nodes, so that
/// `weights . values` integrates against it.
struct Pushforward {
  std::optional<AtomicMeasure> atoms;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> values;

  /// Integral of a function of p against the push-forward.
  template <class F>
  auto integrate(F&& g) const -> decltype(g(0.0)) {
    using R = decltype(g(0.0));
    R acc{};
    if (atoms) {
      for (Eigen::Index j = 0; j < atoms->size(); ++j) acc += atoms->weights(j) * g(atoms->points(0, j));
      return acc;
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * values[i] * g(nodes[i]);
    return acc;
  }
};
Pushforward radon_pushforward(const MeasureModel& m, const Direction& omega, const RadonSettings& s = {});

/// Function of (w, p) on S^{d-1} x R.
using HyperplaneFunction = std::function<double(const Vector& omega, double p)>;

/// R* psi(x): mean of psi(w, x . w) over `directions` (normalized measure).
double dual_transform(const HyperplaneFunction& psi, const Matrix& directions, const Eigen::Ref<const Vector>& x);
/// Sampled psi, linear in p; throws OffsetOutOfRange if x . w leaves the range.
double dual_transform(const Sinogram& psi, const Eigen::Ref<const Vector>& x);

/// Both sides of <R phi, psi> = <phi, R* psi>.
struct AdjointReport {
  double sinogram_side;
  double image_side;
  double residual;  // relative
};
AdjointReport adjoint_residual(const GridDensity& phi, const HyperplaneFunction& psi, int n_omega = 180,
                               const RadonSettings& s = {});

/// mu(H_{w,p}). Models singular at the origin require p < 0.
double halfspace_mass(const MeasureModel& m, const Halfspace& h, const RadonSettings& s = {});

/// mu(H) for mu = h(x') delta_0(x_3) with h homogeneous of degree -3 on R^2,
/// from the values of h on the unit circle. Requires p < 0.
double halfspace_trace_mass(const std::function<double(const Vector&)>& trace, const Halfspace& h,
                            int angular_nodes = 128);

/// Monte Carlo estimate of mu(H) for a Gaussian analytic density in any d;
/// returns value and standard error.
std::pair<double, double> halfspace_mass_monte_carlo(const AnalyticDensity& gaussian, const Halfspace& h,
                                                     std::size_t n, std::uint64_t seed);

/// |<Rm(w,.), phi> + int mu(H_{w,p}) phi'(p) dp| for a 1-D test function phi.
struct DerivativeResidual {
  double pushforward_pairing;
  double halfspace_side;
  double residual;
};
DerivativeResidual halfspace_derivative_residual(const MeasureModel& m, const Direction& omega,
                                                 const BumpFunction& phi, const RadonSettings& s = {});

/// Odd-dimension inversion check on a 3-D grid: R*(-d_p^2)R phi, fitted to
/// phi by one scalar c.
struct InversionReport {
  double c;
  double residual;  // relative L2 after the fit
};
struct InversionSettings {
  int n_omega = 512;
  int n_p = 129;
};
/// Backprojected filtered image B = R*(-d_p^2)R phi on the grid nodes.
std::vector<double> filtered_backprojection_3d(const GridDensity& phi, const InversionSettings& is = {},
                                               const RadonSettings& s = {});
InversionReport odd_d_inversion_check(const GridDensity& phi, const InversionSettings& is = {},
                                      const RadonSettings& s = {});
/// Residual of phi against c B for a given c (cross-validation).
double inversion_residual(const GridDensity& phi, double c, const InversionSettings& is = {},
                          const RadonSettings& s = {});

/// Runs body(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace exradon
