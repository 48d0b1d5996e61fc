#pragma once

#include "exradon/model.hpp"
#include "exradon/radon.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace exradon {

/// Draws in R^d (columns) with the generator and seed that produced them.
struct SampleSet {
  Matrix samples;  // d x n
  std::uint64_t seed = 0;
  std::string generator_id;

  int dim() const { return static_cast<int>(samples.rows()); }
  Eigen::Index size() const { return samples.cols(); }
};

/// Radial Pareto law of index beta (P(|X| > r) = r^{-beta}, r >= 1) with
/// angular law S normalized to a probability (uniform when S is empty).
SampleSet pareto_samples(int d, double beta, std::size_t n, std::uint64_t seed, const SpectralMeasure& angular = {});

/// l(t) = c (1 + log t)^power for t >= 1; power = 0 is the constant case.
struct SlowlyVarying {
  double c = 1.0;
  double power = 0.0;

  double operator()(double t) const;
};

/// mu_t = t^beta l(t) rho_(t), with rho_(t)(E) = rho(tE).
struct ScalingFamily {
  std::variant<SampleSet, MeasureModel> rho;
  double beta = 1.0;
  SlowlyVarying l;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// mu_t(H_{omega,p}) = t^beta l(t) rho(H_{omega,tp}); the empirical fraction
/// with its binomial standard error for samples, halfspace_mass for models.
Estimate scaled_halfspace(const ScalingFamily& f, const Direction& omega, double p, double t,
                          const RadonSettings& s = {});

struct TailIndex {
  double beta_hat;
  double ci_lo;
  double ci_hi;
  int k;
};

/// Hill estimator from the k largest radii |X_i|; k <= 0 selects sqrt(n).
TailIndex tail_index_estimate(const SampleSet& s, int k_order = 0);

/// b(omega) = int ((-omega) . theta)_+^beta S(d theta).
double spectral_forward(const SpectralMeasure& S, double beta, const Direction& omega);

struct TailLimitFunction {
  Matrix directions;  // d x n
  Vector values;      // n, >= 0

  static TailLimitFunction from_spectral(const SpectralMeasure& S, double beta, const Matrix& directions);
};

struct SpectralInverseReport {
  SpectralMeasure S;           // atoms on the fixed direction grid
  double residual = 0.0;       // ||A s - b|| / max(||b||, tiny)
  double condition_number = 0.0;
  double baseline_beta = 0.0;  // non-integral reference exponent
  double baseline_condition = 0.0;
  double condition_ratio = 1.0;
  bool polynomial_obstruction = false;  // integral beta with condition_ratio >= 10
  int iterations = 0;
};

struct SpectralInverseSettings {
  int max_iterations = 10000;
  double tolerance = 1e-10;        // projected-gradient stopping threshold
  double residual_tolerance = 1e-3;  // above this the data is reported Infeasible
};

/// Non-negative least-squares fit of S with atoms on uniform_directions(d,
/// n_atoms) to spectral_forward(S, beta, omega_i) = b(omega_i), by
/// accelerated projected gradient started from a uniform S.
SpectralInverseReport spectral_inverse(const TailLimitFunction& b, double beta, int n_atoms,
                                       const SpectralInverseSettings& settings = {});

/// Design matrix A_ij = ((-omega_i) . theta_j)_+^beta and its 2-norm condition number.
Matrix spectral_design(const Matrix& directions, const Matrix& atoms, double beta);
double condition_number(const Matrix& a);

enum class Cor2Condition { nonintegral, vanishes_on_open_set, neither };
const char* to_string(Cor2Condition c);

struct Cor2Report {
  Cor2Condition condition;
  std::string warning;  // set for `neither`
};

/// Which hypothesis of the convergence criterion holds: beta farther than
/// 1e-9 from an integer, or b below tol on a sampled cap of angular radius
/// max(5 degrees, sample spacing) containing at least three samples.
/// The default tol is 1e-9 max |b|.
Cor2Report check_cor2_conditions(const TailLimitFunction& b, double beta, double tol = -1.0);

/// Discrete law over d x d matrices (M) and vectors (Q), or lognormal
/// entries exp(mu + sigma N) when the corresponding list is empty.
struct KestenParams {
  int dim = 1;
  std::vector<Matrix> m_values;
  std::vector<double> m_probs;
  double m_log_mean = 0.0, m_log_sigma = 0.0;
  std::vector<Vector> q_values;
  std::vector<double> q_probs;
  double q_log_mean = 0.0, q_log_sigma = 0.0;
  Vector y0;  // defaults to 0
  int n_burnin = 1000;
  int n_samples = 100000;
  int n_chains = 8;
  int thin = 10;
  double overflow_guard = 1e300;
};

/// Y_n = M_n Y_{n-1} + Q_n on independent chains (stream = chain index),
/// recorded every `thin` steps after the burn-in.
SampleSet kesten_simulate(const KestenParams& kp, std::uint64_t seed);

/// The scalar chain M in {2, 1/2} with probabilities (0.3, 0.7), Q = 1.
KestenParams kesten_scalar_example(int n_samples = 100000);

/// n^{-1/beta} (block sums - centering) over consecutive blocks of size n;
/// centering is 0 for beta < 1 and n times the sample mean otherwise.
SampleSet stable_sum_demo(const SampleSet& s, double beta, int block);

}  // namespace exradon
