#pragma once

#include "exradon/model.hpp"
#include "exradon/radon.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace exradon {

enum class SequenceKind { shrinking_atom, derivative_blowup, scaled_probability, custom };
const char* to_string(SequenceKind k);

struct MeasureSequence {
  std::function<MeasureModel(int)> generator;
  std::optional<double> norm_bound;
  SequenceKind kind = SequenceKind::custom;
  std::string name;
  double norm_exclusion = 0.0;  // norms are total variations outside this radius

  MeasureModel operator()(int k) const { return generator(k); }

  /// delta_{a / k}.
  static MeasureSequence shrinking_atom(const Vector& a);
  /// k^2 f'(k x) on R with f a unit-mass bump.
  static MeasureSequence derivative_blowup();
  /// mu_k = k^beta rho_(k) for the Pareto law rho (inner cutoff 1) with
  /// angular probability S: the homogeneous measure restricted to |x| > 1/k.
  static MeasureSequence scaled_pareto(const SpectralMeasure& S, double beta);
  /// delta_{k a}: unit norms, mass escaping to infinity.
  static MeasureSequence escaping_atom(const Vector& a);
  /// The zero measure in R^d for every k.
  static MeasureSequence zero(int d);
};

/// Geometric grid {2, 4, ..., 1024}.
std::vector<int> default_k_grid();

enum class LimitFlag { converged, divergent, oscillating };
const char* to_string(LimitFlag f);

struct LimitRow {
  std::string label;
  std::vector<double> values;  // one per k
  double limit = 0.0;          // Aitken extrapolation of the last three values
  LimitFlag flag = LimitFlag::divergent;
  std::optional<double> reference;  // limit-model value when supplied
  std::optional<double> residual;   // |limit - reference|
};

struct LimitTable {
  std::vector<int> k_values;
  std::vector<LimitRow> rows;
  std::vector<double> norms;  // total variation of mu_k
  bool norm_bound_violated = false;

  bool all_converged() const;
};

struct LimitSettings {
  double rtol = 1e-3;
  double atol = 1e-12;
  RadonSettings radon{};
  QuadratureSettings quad{};
};

/// The last three values agree within rtol (relative) + atol and the Aitken
/// limits from the last two triples agree as well: converged. Alternating
/// successive differences: oscillating. Otherwise divergent.
LimitFlag classify_sequence(const std::vector<double>& v, double rtol, double atol, double* limit = nullptr);

/// mu_k(H) for each halfspace and k.
LimitTable halfspace_limit_table(const MeasureSequence& seq, const std::vector<Halfspace>& halfspaces,
                                 const std::vector<int>& k_values, const LimitSettings& s = {});

/// <mu_k, phi> for each phi and k; with a limit model also <mu, phi> and the residual.
LimitTable testfn_limit_table(const MeasureSequence& seq, const std::vector<BumpFunction>& phis,
                              const std::vector<int>& k_values, const std::optional<MeasureModel>& limit = std::nullopt,
                              const LimitSettings& s = {});

struct NormReport {
  std::vector<int> k_values;
  std::vector<double> norms;
  double limit_norm = 0.0;
  bool norms_converge = false;           // ||mu_k|| -> ||mu||
  std::vector<double> c0_pairings;       // <mu_k, phi> for the supplied bump
  double c0_limit = 0.0;                 // <mu, phi>
  std::vector<double> bounded_pairings;  // <mu_k, 1>
  double bounded_limit = 0.0;            // <mu, 1>
  bool bounded_converges = false;
  bool norm_condition_violated = false;  // norms do not converge to ||mu||
};

/// Norm continuity: when ||mu_k|| -> ||mu||, pairings extend to bounded test
/// functions; here the bounded test function is the constant 1.
NormReport norm_continuity_check(const MeasureSequence& seq, const MeasureModel& limit, const BumpFunction& phi,
                                 const std::vector<int>& k_values, const LimitSettings& s = {});

/// mu(H_1) + mu(H_2) for two halfspaces covering R^d (x_1 < r and x_1 > -r).
double covering_halfspace_bound(const MeasureModel& m, double r = 1.0, const RadonSettings& s = {});

}  // namespace exradon
