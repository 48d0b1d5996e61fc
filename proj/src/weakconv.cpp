#include "exradon/weakconv.hpp"

#include <algorithm>

namespace exradon {

const char* to_string(SequenceKind k) {
  switch (k) {
    case SequenceKind::shrinking_atom: return "shrinking_atom";
    case SequenceKind::derivative_blowup: return "derivative_blowup";
    case SequenceKind::scaled_probability: return "scaled_probability";
    case SequenceKind::custom: return "custom";
  }
  return "?";
}

const char* to_string(LimitFlag f) {
  switch (f) {
    case LimitFlag::converged: return "CONVERGED";
    case LimitFlag::divergent: return "DIVERGENT";
    case LimitFlag::oscillating: return "OSCILLATING";
  }
  return "?";
}

MeasureSequence MeasureSequence::shrinking_atom(const Vector& a) {
  return {[a](int k) { return MeasureModel(AtomicMeasure::dirac(Vector(a / k))); }, 1.0, SequenceKind::shrinking_atom,
          "shrinking_atom"};
}

MeasureSequence MeasureSequence::derivative_blowup() {
  return {[](int k) { return MeasureModel(AnalyticDensity::derivative_blowup(k)); }, std::nullopt,
          SequenceKind::derivative_blowup, "derivative_blowup"};
}

MeasureSequence MeasureSequence::scaled_pareto(const SpectralMeasure& S, double beta) {
  require(beta > 0.0, ErrorCode::BadParams, "beta must be positive");
  require(std::abs(S.total_mass() - 1.0) < 1e-12, ErrorCode::BadParams, "the angular law must be a probability");
  const int d = S.dim();
  return {[S, beta, d](int k) { return MeasureModel(PolarHomogeneous{d, -beta - d, S, 1.0 / k}); }, std::nullopt,
          SequenceKind::scaled_probability, "scaled_pareto", 1.0};
}

MeasureSequence MeasureSequence::escaping_atom(const Vector& a) {
  return {[a](int k) { return MeasureModel(AtomicMeasure::dirac(Vector(k * a))); }, 1.0, SequenceKind::custom,
          "escaping_atom"};
}

MeasureSequence MeasureSequence::zero(int d) {
  return {[d](int) { return MeasureModel(AtomicMeasure(Matrix(d, 0), Vector(0))); }, 0.0, SequenceKind::custom,
          "zero"};
}

std::vector<int> default_k_grid() {
  std::vector<int> k;
  for (int v = 2; v <= 1024; v *= 2) k.push_back(v);
  return k;
}

bool LimitTable::all_converged() const {
  return std::all_of(rows.begin(), rows.end(), [](const LimitRow& r) { return r.flag == LimitFlag::converged; });
}

namespace {

bool close(double a, double b, double rtol, double atol) {
  return std::abs(a - b) <= rtol * std::max(std::abs(a), std::abs(b)) + atol;
}

double aitken(double v1, double v2, double v3) {
  const double d1 = v2 - v1, d2 = v3 - v2;
  const double den = d2 - d1;
  if (std::abs(den) <= 1e-14 * (std::abs(d1) + std::abs(d2)) || den == 0.0) return v3;
  return v3 - d2 * d2 / den;
}

double measure_norm(const MeasureModel& m, double exclusion, const QuadratureSettings& q) {
  if (const auto* p = std::get_if<PolarHomogeneous>(&m)) return total_variation(m, std::max(exclusion, p->inner_cutoff), q);
  return total_variation(m, exclusion, q);
}

void finish_table(const MeasureSequence& seq, LimitTable& t, const LimitSettings& s) {
  for (int k : t.k_values) t.norms.push_back(measure_norm(seq(k), seq.norm_exclusion, s.quad));
  const std::size_t n = t.norms.size();
  if (seq.norm_bound) {
    for (double v : t.norms) t.norm_bound_violated |= v > *seq.norm_bound * (1.0 + 1e-9) + s.atol;
  } else if (n >= 2 && t.norms[n - 2] > 0.0) {
    // growth exponent between the last two k values
    const double slope = std::log(t.norms[n - 1] / t.norms[n - 2]) /
                         std::log(static_cast<double>(t.k_values[n - 1]) / t.k_values[n - 2]);
    t.norm_bound_violated = slope > 0.1;
  }
  for (auto& r : t.rows) r.flag = classify_sequence(r.values, s.rtol, s.atol, &r.limit);
}

}  // namespace

LimitFlag classify_sequence(const std::vector<double>& v, double rtol, double atol, double* limit) {
  const std::size_t n = v.size();
  if (limit) *limit = n ? v.back() : 0.0;
  if (n < 3) return LimitFlag::divergent;
  const double a3 = aitken(v[n - 3], v[n - 2], v[n - 1]);
  if (limit) *limit = a3;
  const bool last_agree = close(v[n - 1], v[n - 2], rtol, atol) && close(v[n - 2], v[n - 3], rtol, atol) &&
                          close(v[n - 1], v[n - 3], rtol, atol);
  const bool stable = n < 4 || close(a3, aitken(v[n - 4], v[n - 3], v[n - 2]), rtol, atol);
  if (last_agree && stable) return LimitFlag::converged;
  int sign_changes = 0;
  for (std::size_t i = 2; i < n; ++i) {
    const double d1 = v[i - 1] - v[i - 2], d2 = v[i] - v[i - 1];
    if (d1 * d2 < 0.0) ++sign_changes;
  }
  return sign_changes >= 2 ? LimitFlag::oscillating : LimitFlag::divergent;
}

LimitTable halfspace_limit_table(const MeasureSequence& seq, const std::vector<Halfspace>& halfspaces,
                                 const std::vector<int>& k_values, const LimitSettings& s) {
  LimitTable t;
  t.k_values = k_values;
  t.rows.resize(halfspaces.size());
  for (std::size_t i = 0; i < halfspaces.size(); ++i) {
    t.rows[i].label = "H(" + std::to_string(i) + ")";
    t.rows[i].values.resize(k_values.size());
  }
  parallel_for(k_values.size(), s.radon.threads, [&](std::size_t j) {
    const MeasureModel m = seq(k_values[j]);
    for (std::size_t i = 0; i < halfspaces.size(); ++i) t.rows[i].values[j] = halfspace_mass(m, halfspaces[i], s.radon);
  });
  finish_table(seq, t, s);
  return t;
}

LimitTable testfn_limit_table(const MeasureSequence& seq, const std::vector<BumpFunction>& phis,
                              const std::vector<int>& k_values, const std::optional<MeasureModel>& limit,
                              const LimitSettings& s) {
  LimitTable t;
  t.k_values = k_values;
  t.rows.resize(phis.size());
  for (std::size_t i = 0; i < phis.size(); ++i) {
    t.rows[i].label = "phi(" + std::to_string(i) + ")";
    t.rows[i].values.resize(k_values.size());
  }
  parallel_for(k_values.size(), s.radon.threads, [&](std::size_t j) {
    const MeasureModel m = seq(k_values[j]);
    for (std::size_t i = 0; i < phis.size(); ++i) t.rows[i].values[j] = eval_measure_pairing(m, phis[i], s.quad);
  });
  finish_table(seq, t, s);
  if (limit)
    for (std::size_t i = 0; i < phis.size(); ++i) {
      t.rows[i].reference = eval_measure_pairing(*limit, phis[i], s.quad);
      t.rows[i].residual = std::abs(t.rows[i].limit - *t.rows[i].reference);
    }
  return t;
}

NormReport norm_continuity_check(const MeasureSequence& seq, const MeasureModel& limit, const BumpFunction& phi,
                                 const std::vector<int>& k_values, const LimitSettings& s) {
  NormReport r;
  r.k_values = k_values;
  for (int k : k_values) {
    const MeasureModel m = seq(k);
    r.norms.push_back(measure_norm(m, seq.norm_exclusion, s.quad));
    r.c0_pairings.push_back(eval_measure_pairing(m, phi, s.quad));
    r.bounded_pairings.push_back(total_mass(m, s.quad));
  }
  r.limit_norm = measure_norm(limit, seq.norm_exclusion, s.quad);
  r.c0_limit = eval_measure_pairing(limit, phi, s.quad);
  r.bounded_limit = total_mass(limit, s.quad);
  double norm_lim = 0.0, bounded_lim = 0.0;
  const bool nc = classify_sequence(r.norms, s.rtol, s.atol, &norm_lim) == LimitFlag::converged;
  const bool bc = classify_sequence(r.bounded_pairings, s.rtol, s.atol, &bounded_lim) == LimitFlag::converged;
  r.norms_converge = nc && close(norm_lim, r.limit_norm, s.rtol, s.atol);
  r.bounded_converges = bc && close(bounded_lim, r.bounded_limit, s.rtol, s.atol);
  r.norm_condition_violated = !r.norms_converge;
  return r;
}

double covering_halfspace_bound(const MeasureModel& m, double r, const RadonSettings& s) {
  const int d = dim(m);
  const Direction e = Direction::axis(d, 0);
  return halfspace_mass(m, {e, r}, s) + halfspace_mass(m, {-e, r}, s);
}

}  // namespace exradon
