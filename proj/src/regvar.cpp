#include "exradon/regvar.hpp"

#include "exradon/random.hpp"
#include "exradon/sphere.hpp"

#include <Eigen/SVD>
#include <algorithm>

namespace exradon {

SampleSet pareto_samples(int d, double beta, std::size_t n, std::uint64_t seed, const SpectralMeasure& angular) {
  require(beta > 0.0, ErrorCode::BadParams, "Pareto index must be positive");
  require(d >= 1 && d <= kMaxDim, ErrorCode::BadParams, "dimension out of range");
  require(angular.size() == 0 || angular.dim() == d, ErrorCode::BadParams, "angular law dimension mismatch");
  Philox rng(seed, 0);
  SampleSet out;
  out.seed = seed;
  out.generator_id = std::string(Philox::id) + "/pareto";
  out.samples.resize(d, static_cast<Eigen::Index>(n));
  std::vector<double> probs(angular.weights.data(), angular.weights.data() + angular.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::pow(rng.uniform(), -1.0 / beta);
    Vector theta(d);
    if (angular.size() > 0) {
      theta = angular.atoms.col(static_cast<Eigen::Index>(rng.categorical(probs)));
    } else {
      for (int k = 0; k < d; ++k) theta(k) = rng.normal();
      theta.normalize();
    }
    out.samples.col(static_cast<Eigen::Index>(i)) = r * theta;
  }
  return out;
}

double SlowlyVarying::operator()(double t) const {
  require(t >= 1.0, ErrorCode::BadParams, "slowly varying factor is evaluated for t >= 1");
  require(c > 0.0, ErrorCode::BadParams, "slowly varying factor must be positive");
  return power == 0.0 ? c : c * std::pow(1.0 + std::log(t), power);
}

Estimate scaled_halfspace(const ScalingFamily& f, const Direction& omega, double p, double t, const RadonSettings& s) {
  require(p < 0.0, ErrorCode::HalfspaceTouchesOrigin, "scaled halfspaces need p < 0");
  require(t >= 1.0, ErrorCode::BadParams, "scale t must be >= 1");
  const double factor = std::pow(t, f.beta) * f.l(t);
  if (const auto* ss = std::get_if<SampleSet>(&f.rho)) {
    require(ss->size() > 0, ErrorCode::TooFewSamples, "empty sample set");
    const Vector proj = ss->samples.transpose() * omega.vec();
    const double frac = static_cast<double>((proj.array() < t * p).count()) / static_cast<double>(proj.size());
    return {factor * frac, factor * std::sqrt(frac * (1.0 - frac) / static_cast<double>(proj.size()))};
  }
  const auto& m = std::get<MeasureModel>(f.rho);
  return {factor * halfspace_mass(m, Halfspace{omega, t * p}, s), 0.0};
}

TailIndex tail_index_estimate(const SampleSet& s, int k_order) {
  const Eigen::Index n = s.size();
  const int k = k_order > 0 ? k_order : static_cast<int>(std::floor(std::sqrt(static_cast<double>(n))));
  require(k >= 2 && k < n, ErrorCode::TooFewSamples, "Hill estimator needs 2 <= k < n");
  std::vector<double> r(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = s.samples.col(i).norm();
  std::nth_element(r.begin(), r.begin() + k, r.end(), std::greater<>());
  const double threshold = r[static_cast<std::size_t>(k)];
  require(threshold > 0.0, ErrorCode::DegenerateSample, "the (k+1)-th largest radius is zero");
  double h = 0.0;
  for (int i = 0; i < k; ++i) h += std::log(r[static_cast<std::size_t>(i)] / threshold);
  h /= k;
  require(h > 0.0, ErrorCode::DegenerateSample, "top radii are all equal; the tail index is undefined");
  const double beta = 1.0 / h;
  const double half = 1.96 / std::sqrt(static_cast<double>(k));
  return {beta, beta * (1.0 - half), beta * (1.0 + half), k};
}

double spectral_forward(const SpectralMeasure& S, double beta, const Direction& omega) {
  require(beta > 0.0, ErrorCode::BadParams, "beta must be positive");
  require(S.dim() == omega.dim(), ErrorCode::BadParams, "spectral measure dimension mismatch");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < S.size(); ++j) {
    const double a = -omega.dot(S.atoms.col(j));
    if (a > 0.0) acc += S.weights(j) * std::pow(a, beta);
  }
  return acc;
}

TailLimitFunction TailLimitFunction::from_spectral(const SpectralMeasure& S, double beta, const Matrix& directions) {
  TailLimitFunction b{directions, Vector(directions.cols())};
  for (Eigen::Index i = 0; i < directions.cols(); ++i)
    b.values(i) = spectral_forward(S, beta, Direction(Vector(directions.col(i))));
  return b;
}

Matrix spectral_design(const Matrix& directions, const Matrix& atoms, double beta) {
  Matrix a = -(directions.transpose() * atoms);
  return a.unaryExpr([beta](double v) { return v > 0.0 ? std::pow(v, beta) : 0.0; });
}

double condition_number(const Matrix& a) {
  const Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0) return 1.0;
  const double lo = sv(sv.size() - 1);
  return lo > 0.0 ? sv(0) / lo : kInf;
}

SpectralInverseReport spectral_inverse(const TailLimitFunction& b, double beta, int n_atoms,
                                       const SpectralInverseSettings& settings) {
  require(beta > 0.0, ErrorCode::BadParams, "beta must be positive");
  const int d = static_cast<int>(b.directions.rows());
  require(b.directions.cols() >= n_atoms, ErrorCode::BadParams, "need at least as many directions as atoms");
  require((b.values.array() >= 0.0).all(), ErrorCode::BadParams, "tail limits must be non-negative");
  const Matrix atoms = uniform_directions(d, n_atoms);
  const Matrix A = spectral_design(b.directions, atoms, beta);
  SpectralInverseReport rep;
  rep.condition_number = condition_number(A);
  rep.baseline_beta = is_integer(beta) ? beta + 0.3 : beta;
  rep.baseline_condition =
      is_integer(beta) ? condition_number(spectral_design(b.directions, atoms, rep.baseline_beta)) : rep.condition_number;
  rep.condition_ratio = rep.condition_number / rep.baseline_condition;
  rep.polynomial_obstruction = is_integer(beta) && rep.condition_ratio >= 10.0;

  // FISTA with gradient restart on 0.5 ||A s - b||^2, s >= 0
  const Matrix AtA = A.transpose() * A;
  const Vector Atb = A.transpose() * b.values;
  const double L = Eigen::JacobiSVD<Matrix>(A).singularValues()(0);
  const double step = 1.0 / (L * L);
  const double row_mass = A.sum() / static_cast<double>(A.rows());
  Vector s = Vector::Constant(n_atoms, row_mass > 0.0 ? b.values.mean() / row_mass : 0.0);
  Vector y = s, prev = s;
  double theta = 1.0;
  int it = 0;
  for (; it < settings.max_iterations; ++it) {
    const Vector grad = AtA * y - Atb;
    const Vector next = (y - step * grad).cwiseMax(0.0);
    const double change = (next - s).norm();
    prev = s;
    s = next;
    if (change <= settings.tolerance * std::max(1.0, s.norm())) break;
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    if ((y - s).dot(s - prev) > 0.0) {
      theta = 1.0;
      y = s;
      continue;
    }
    y = s + ((theta - 1.0) / theta_next) * (s - prev);
    theta = theta_next;
  }
  rep.iterations = it;
  const double bnorm = b.values.norm();
  rep.residual = (A * s - b.values).norm() / std::max(bnorm, 1e-300);
  if (bnorm == 0.0) rep.residual = (A * s).norm();
  require(rep.residual <= settings.residual_tolerance, ErrorCode::Infeasible,
          "tail limits are not representable by a non-negative spectral measure (relative residual " +
              std::to_string(rep.residual) + ")");
  rep.S = SpectralMeasure(atoms, s);
  return rep;
}

const char* to_string(Cor2Condition c) {
  switch (c) {
    case Cor2Condition::nonintegral: return "nonintegral";
    case Cor2Condition::vanishes_on_open_set: return "vanishes_on_open_set";
    case Cor2Condition::neither: return "neither";
  }
  return "?";
}

Cor2Report check_cor2_conditions(const TailLimitFunction& b, double beta, double tol) {
  if (!is_integer(beta, 1e-9)) return {Cor2Condition::nonintegral, ""};
  const Eigen::Index n = b.directions.cols();
  if (tol < 0.0) tol = 1e-9 * std::max(b.values.cwiseAbs().maxCoeff(), 1e-300);
  // the cap must reach the nearest neighbours so that it holds several samples
  double spacing = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = -1.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) best = std::max(best, b.directions.col(i).dot(b.directions.col(j)));
    spacing = std::max(spacing, std::acos(std::clamp(best, -1.0, 1.0)));
  }
  const double cap = std::max(5.0 * pi / 180.0, 1.01 * spacing);
  const double min_cos = std::cos(cap);
  for (Eigen::Index i = 0; i < n; ++i) {
    int inside = 0;
    bool vanishes = true;
    for (Eigen::Index j = 0; j < n && vanishes; ++j) {
      if (b.directions.col(i).dot(b.directions.col(j)) < min_cos) continue;
      ++inside;
      vanishes = std::abs(b.values(j)) < tol;
    }
    if (vanishes && inside >= 3) return {Cor2Condition::vanishes_on_open_set, ""};
  }
  return {Cor2Condition::neither,
          "beta is an integer and b does not vanish on an open cap: mean-zero homogeneous densities of degree "
          "-d-beta have vanishing exterior Radon transform, so the limit measure need not exist"};
}

KestenParams kesten_scalar_example(int n_samples) {
  KestenParams kp;
  kp.dim = 1;
  kp.m_values = {Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 0.5)};
  kp.m_probs = {0.3, 0.7};
  kp.q_values = {Vector::Ones(1)};
  kp.q_probs = {1.0};
  kp.n_samples = n_samples;
  return kp;
}

SampleSet kesten_simulate(const KestenParams& kp, std::uint64_t seed) {
  const int d = kp.dim;
  require(d >= 1 && d <= kMaxDim, ErrorCode::BadParams, "dimension out of range");
  require(kp.n_chains >= 1 && kp.thin >= 1 && kp.n_burnin >= 0 && kp.n_samples >= 1, ErrorCode::BadParams,
          "chain counts must be positive");
  require(kp.m_values.size() == kp.m_probs.size() && kp.q_values.size() == kp.q_probs.size(), ErrorCode::BadParams,
          "each discrete value needs a probability");
  for (const auto& m : kp.m_values)
    require(m.rows() == d && m.cols() == d && (m.array() >= 0.0).all(), ErrorCode::BadParams,
            "M values must be non-negative d x d matrices");
  for (const auto& q : kp.q_values)
    require(q.size() == d && (q.array() >= 0.0).all(), ErrorCode::BadParams, "Q values must be non-negative");
  SampleSet out;
  out.seed = seed;
  out.generator_id = std::string(Philox::id) + "/kesten";
  out.samples.resize(d, kp.n_samples);
  const int per_chain = (kp.n_samples + kp.n_chains - 1) / kp.n_chains;
  parallel_for(static_cast<std::size_t>(kp.n_chains), 1, [&](std::size_t c) {
    Philox rng(seed, c);
    Vector y = kp.y0.size() == d ? kp.y0 : Vector::Zero(d);
    Matrix m(d, d);
    Vector q(d);
    auto step = [&] {
      if (!kp.m_values.empty())
        m = kp.m_values[rng.categorical(kp.m_probs)];
      else
        for (int i = 0; i < d * d; ++i) m.data()[i] = std::exp(kp.m_log_mean + kp.m_log_sigma * rng.normal());
      if (!kp.q_values.empty())
        q = kp.q_values[rng.categorical(kp.q_probs)];
      else
        for (int i = 0; i < d; ++i) q(i) = std::exp(kp.q_log_mean + kp.q_log_sigma * rng.normal());
      y = m * y + q;
      require(y.cwiseAbs().maxCoeff() <= kp.overflow_guard, ErrorCode::Divergence,
              "recursion exceeded the overflow guard; the chain is not contractive");
    };
    for (int i = 0; i < kp.n_burnin; ++i) step();
    const int first = static_cast<int>(c) * per_chain;
    const int last = std::min(kp.n_samples, first + per_chain);
    for (int k = first; k < last; ++k) {
      for (int i = 0; i < kp.thin; ++i) step();
      out.samples.col(k) = y;
    }
  });
  return out;
}

SampleSet stable_sum_demo(const SampleSet& s, double beta, int block) {
  require(beta > 0.0 && beta < 2.0, ErrorCode::BadParams, "stable domains of attraction need beta in (0, 2)");
  require(block >= 10, ErrorCode::BadParams, "block size must be >= 10");
  const Eigen::Index nb = s.size() / block;
  require(nb >= 1, ErrorCode::TooFewSamples, "fewer samples than one block");
  const Vector center = beta < 1.0 ? Vector::Zero(s.dim()) : Vector(s.samples.rowwise().mean() * double(block));
  const double scale = std::pow(static_cast<double>(block), -1.0 / beta);
  SampleSet out;
  out.seed = s.seed;
  out.generator_id = s.generator_id + "/block" + std::to_string(block);
  out.samples.resize(s.dim(), nb);
  for (Eigen::Index j = 0; j < nb; ++j)
    out.samples.col(j) = scale * (s.samples.middleCols(j * block, block).rowwise().sum() - center);
  return out;
}

}  // namespace exradon
