#include "experiments.hpp"

#include "exradon/counterexamples.hpp"
#include "exradon/fourier.hpp"
#include "exradon/homog.hpp"
#include "exradon/projective.hpp"
#include "exradon/quadrature.hpp"
#include "exradon/random.hpp"
#include "exradon/regvar.hpp"
#include "exradon/sphere.hpp"
#include "exradon/weakconv.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>

namespace exradon::cli {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

std::string short_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// Typed access to the params object; keys never read are rejected by finish().
class Params {
 public:
  explicit Params(const Json& j) : j_(j.is_null() ? Json::object() : j) {
    if (!j_.is_object()) config_error("params must be an object");
  }

  double num(const char* key, double def) {
    const Json* v = get(key);
    if (!v) return def;
    if (!v->is_number()) config_error(std::string("params.") + key + " must be a number");
    return v->get<double>();
  }

  int integer(const char* key, int def) {
    const Json* v = get(key);
    if (!v) return def;
    if (!v->is_number_integer()) config_error(std::string("params.") + key + " must be an integer");
    return v->get<int>();
  }

  std::string str(const char* key, const std::string& def) {
    const Json* v = get(key);
    if (!v) return def;
    if (!v->is_string()) config_error(std::string("params.") + key + " must be a string");
    return v->get<std::string>();
  }

  bool flag(const char* key, bool def) {
    const Json* v = get(key);
    if (!v) return def;
    if (!v->is_boolean()) config_error(std::string("params.") + key + " must be a boolean");
    return v->get<bool>();
  }

  std::vector<double> nums(const char* key, std::vector<double> def) {
    const Json* v = get(key);
    if (!v) return def;
    if (v->is_number()) return {v->get<double>()};
    if (!v->is_array()) config_error(std::string("params.") + key + " must be a number or an array of numbers");
    std::vector<double> out;
    for (const auto& x : *v) {
      if (!x.is_number()) config_error(std::string("params.") + key + " must be an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  /// A string or an array of strings.
  std::vector<std::string> strs(const char* key, std::vector<std::string> def) {
    const Json* v = get(key);
    if (!v) return def;
    if (v->is_string()) return {v->get<std::string>()};
    if (!v->is_array()) config_error(std::string("params.") + key + " must be a string or an array of strings");
    std::vector<std::string> out;
    for (const auto& x : *v) {
      if (!x.is_string()) config_error(std::string("params.") + key + " must be an array of strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }

  const Json* raw(const char* key) { return get(key); }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) config_error("unknown parameter '" + item.key() + "'");
  }

 private:
  const Json* get(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  Json j_;
  std::set<std::string> seen_;
};

std::string slug(const std::string& experiment) {
  std::string s = experiment;
  std::replace(s.begin(), s.end(), ' ', '-');
  return s;
}

// Collects checks and artifacts for one run.
class Session {
 public:
  Session(const ExperimentConfig& cfg, RunResult& r) : cfg_(cfg), r_(r) {
    const char* env = std::getenv("EXRADON_OUT");
    const std::filesystem::path root = env && *env ? std::filesystem::path(env) : std::filesystem::path(cfg.out);
    r_.directory = root / slug(cfg.experiment);
  }

  const ExperimentConfig& cfg() const { return cfg_; }
  Json& report() { return r_.report; }
  double tol(double t) const { return t * cfg_.tolerance_scale; }
  RadonSettings radon() const {
    RadonSettings s;
    s.threads = cfg_.threads;
    return s;
  }

  void less(const std::string& name, double value, double bound) {
    r_.checks.push_back({name, value, bound, Check::Op::less, std::isfinite(value) && value < bound});
  }
  void greater(const std::string& name, double value, double bound) {
    r_.checks.push_back({name, value, bound, Check::Op::greater, std::isfinite(value) && value > bound});
  }
  void truth(const std::string& name, bool ok) {
    r_.checks.push_back({name, ok ? 1.0 : 0.0, 1.0, Check::Op::is_true, ok});
  }

  void csv(const std::string& name, const CsvTable& t) { write(name + ".csv", t.str()); }
  void json(const std::string& name, const Json& j) {
    const auto path = r_.directory / (name + ".json");
    write_json(path, j);
    r_.artifacts.push_back(path);
  }
  void svg(const std::string& name, const SvgPlot& p) {
    if (cfg_.plot) write(name + ".svg", p.str());
  }

 private:
  void write(const std::string& file, const std::string& text) {
    const auto path = r_.directory / file;
    write_text(path, text);
    r_.artifacts.push_back(path);
  }

  const ExperimentConfig& cfg_;
  RunResult& r_;
};

SvgPlot make_plot(std::string title, std::string x_label, std::string y_label) {
  SvgPlot p;
  p.title = std::move(title);
  p.x_label = std::move(x_label);
  p.y_label = std::move(y_label);
  return p;
}

Json vec_json(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

Direction direction_param(Params& p, const char* key, int d, const std::vector<double>& def) {
  std::vector<double> v = p.nums(key, def);
  if (static_cast<int>(v.size()) != d) {
    if (d != 2 || v.size() != 1) config_error(std::string("params.") + key + " needs " + std::to_string(d) + " components");
    return Direction::from_angle(v[0]);  // an angle in d = 2
  }
  return Direction::normalized(to_vector(v));
}

// ---------------------------------------------------------------------------
// Named phantoms shared by radon, slice-check and adjoint-check

struct Phantom {
  std::string label;
  MeasureModel model;
  double tolerance;  // slice-check bound for this model class
};

AtomicMeasure random_atoms(int d, int n, std::uint64_t seed) {
  Philox rng(seed, 7);
  Matrix pts(d, n);
  Vector w(n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < d; ++k) pts(k, j) = rng.normal();
    w(j) = rng.normal();
  }
  return AtomicMeasure(pts, w);
}

Phantom named_phantom(const std::string& name, int d, int grid_n, std::uint64_t seed) {
  if (name == "gaussian") return {name, AnalyticDensity::gaussian(d), 1e-4};
  if (name == "disk") return {name, AnalyticDensity::ball_indicator(d), 1e-3};
  if (name == "atomic") return {name, random_atoms(d, 10, seed), 1e-10};
  if (name == "grid-gaussian") {
    const auto g = AnalyticDensity::gaussian(d);
    return {name, GridDensity::sample(d, grid_n, 6.0, [&](const Vector& x) { return g(x); }), 1e-2};
  }
  if (name == "grid-disk") {
    const auto b = AnalyticDensity::ball_indicator(d);
    return {name, GridDensity::sample(d, grid_n, 1.5, [&](const Vector& x) { return b(x); }, 4), 1e-2};
  }
  if (name == "cone-gaussian") {
    require(d == 2, ErrorCode::ConfigError, "cone-gaussian is defined for d = 2");
    Vector c(2);
    c << 0.2, 1.2;
    return {name, AnalyticDensity::cone_gaussian(2, 0.5, 1.0, c), 1e-4};
  }
  config_error("unknown measure '" + name + "'");
}

Phantom phantom_param(Params& p, int d, int grid_n, std::uint64_t seed, const std::string& def) {
  if (const Json* j = p.raw("measure"); j && j->is_object()) return {"custom", measure_from_json(*j), 1e-4};
  return named_phantom(p.str("measure", def), d, grid_n, seed);
}

// ---------------------------------------------------------------------------

void run_radon(Params& p, Session& s) {
  const int d = p.integer("d", 2);
  const int grid_n = p.integer("grid_n", 256);
  Phantom ph = phantom_param(p, d, grid_n, s.cfg().seed, "gaussian");
  SinogramSampling smp{d, p.integer("n_omega", 180), p.num("p_min", -3.0), p.num("p_max", 3.0), p.integer("n_p", 129)};
  const double tol = s.tol(p.num("tolerance", 1e-9));
  p.finish();
  if (dim(ph.model) != d) config_error("measure dimension does not match d");
  try {
    smp.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }

  const Sinogram sino = radon_forward(ph.model, smp, s.radon());
  const double defect = sino.evenness_defect();
  s.csv("sinogram", sinogram_csv(sino));
  s.json("sinogram", sinogram_metadata(sino));
  s.report()["measure"] = ph.label;
  s.report()["evenness_defect"] = defect;
  s.less("evenness_defect", defect, tol);

  SvgPlot plot = make_plot("Radon transform of " + ph.label, "p", "Rf(omega, p)");
  const Eigen::Index nw = sino.directions.cols();
  for (Eigen::Index i : {Eigen::Index(0), nw / 4, nw / 2}) {
    SvgSeries ser{"omega #" + std::to_string(i), sino.offsets, {}};
    for (std::size_t j = 0; j < sino.offsets.size(); ++j) ser.y.push_back(sino.values(i, static_cast<Eigen::Index>(j)));
    plot.series.push_back(ser);
  }
  s.svg("sinogram", plot);
}

void run_slice_check(Params& p, Session& s) {
  const int d = p.integer("d", 2);
  const int grid_n = p.integer("grid_n", 256);
  std::vector<Phantom> phantoms;
  if (const Json* j = p.raw("measure"); j && j->is_object()) {
    phantoms.push_back({"custom", measure_from_json(*j), 1e-4});
  } else {
    std::vector<std::string> names = p.strs("measure", {"all"});
    if (names == std::vector<std::string>{"all"}) names = {"atomic", "grid-gaussian", "gaussian"};
    for (const auto& n : names) phantoms.push_back(named_phantom(n, d, grid_n, s.cfg().seed));
  }
  const Direction omega = direction_param(p, "omega", d, d == 2 ? std::vector<double>{0.9} : std::vector<double>{1, 2, -1});
  const int n_sigma = p.integer("n_sigma", 32);
  const double sigma_max = p.num("sigma_max", 4.0);
  const double tol_override = p.num("tolerance", -1.0);
  p.finish();
  if (n_sigma < 2 || !(sigma_max > 0)) config_error("slice-check needs n_sigma >= 2 and sigma_max > 0");

  std::vector<double> sig;
  for (int i = 0; i < n_sigma; ++i) sig.push_back(-sigma_max + 2.0 * sigma_max * i / (n_sigma - 1));
  SvgPlot plot = make_plot("Fourier slice residual", "sigma", "|difference|");
  plot.log_y = true;
  Json rows = Json::object();
  for (const auto& ph : phantoms) {
    if (dim(ph.model) != d) config_error("measure dimension does not match d");
    const SliceReport rep = slice_residual(ph.model, omega, sig, s.radon(), s.cfg().quadrature);
    CsvTable t({"sigma", "re_slice", "im_slice", "re_direct", "im_direct", "abs_diff"});
    SvgSeries ser{ph.label, {}, {}};
    for (const auto& r : rep.rows) {
      t.add_row({r.sigma, r.slice.real(), r.slice.imag(), r.direct.real(), r.direct.imag(), r.abs_diff});
      ser.x.push_back(r.sigma);
      ser.y.push_back(std::max(r.abs_diff, 1e-18));
    }
    plot.series.push_back(ser);
    s.csv("slice_" + ph.label, t);
    rows[ph.label] = rep.max_abs_diff;
    s.less(ph.label + ".max_abs_diff", rep.max_abs_diff, s.tol(tol_override > 0 ? tol_override : ph.tolerance));
  }
  s.report()["max_abs_diff"] = rows;
  s.report()["omega"] = vec_json(omega.vec());
  s.svg("slice", plot);
}

void run_adjoint_check(Params& p, Session& s) {
  std::vector<std::string> names = p.strs("measure", {"gaussian", "disk"});
  const int n = p.integer("n", 256);
  const int n_omega = p.integer("n_omega", 180);
  const double tol = s.tol(p.num("tolerance", 1e-2));
  p.finish();
  if (n < 8 || n_omega < 4) config_error("adjoint-check needs n >= 8 and n_omega >= 4");

  CsvTable t({"measure", "sinogram_side", "image_side", "residual"});
  SvgPlot plot = make_plot("Adjoint residual", "phantom index", "relative residual");
  plot.log_y = true;
  SvgSeries ser{"residual", {}, {}};
  for (const auto& name : names) {
    GridDensity grid = [&] {
      if (name == "gaussian") return std::get<GridDensity>(named_phantom("grid-gaussian", 2, n, 0).model);
      if (name == "disk") return std::get<GridDensity>(named_phantom("grid-disk", 2, n, 0).model);
      config_error("adjoint-check measure must be gaussian or disk");
    }();
    HyperplaneFunction psi;
    if (name == "gaussian") {
      psi = [](const Vector&, double q) { return std::exp(-q * q / 2); };
    } else {
      const BumpFunction b = BumpFunction::on_line(0.2, 0.6);
      psi = [b](const Vector&, double q) { return b(q); };
    }
    const AdjointReport r = adjoint_residual(grid, psi, n_omega, s.radon());
    t.add_row({name, format_double(r.sinogram_side), format_double(r.image_side), format_double(r.residual)});
    s.report()["residual"][name] = r.residual;
    ser.x.push_back(static_cast<double>(ser.x.size()));
    ser.y.push_back(std::max(r.residual, 1e-18));
    s.less(name + ".residual", r.residual, tol);
  }
  plot.series.push_back(ser);
  plot.h_lines.push_back(tol);
  s.csv("adjoint", t);
  s.svg("adjoint", plot);
}

void run_invert3d(Params& p, Session& s) {
  const int n = p.integer("n", 64);
  const double hw = p.num("half_width", 3.0);
  const double sigma = p.num("sigma", 0.5);
  InversionSettings is;
  is.n_omega = p.integer("n_omega", is.n_omega);
  is.n_p = p.integer("n_p", is.n_p);
  const double tol = s.tol(p.num("tolerance", 5e-2));
  p.finish();
  if (n < 8 || is.n_omega < 4 || is.n_p < 8) config_error("invert3d-check needs n >= 8, n_omega >= 4, n_p >= 8");

  const auto gauss = AnalyticDensity::gaussian(3, sigma);
  const GridDensity g = GridDensity::sample(3, n, hw, [&](const Vector& x) { return gauss(x); });
  Vector c1(3), c2(3);
  c1 << 0.8, 0.0, 0.3;
  c2 << -0.7, 0.5, -0.2;
  const BumpFunction b1(c1, 0.9), b2(c2, 0.8, 0.6);
  const GridDensity two = GridDensity::sample(3, n, hw, [&](const Vector& x) { return b1(x) + b2(x); });

  const RadonSettings rs = s.radon();
  const InversionReport fit = odd_d_inversion_check(g, is, rs);
  const double cross = inversion_residual(two, fit.c, is, rs);
  CsvTable t({"phantom", "c", "residual"});
  t.add_row({"gaussian", format_double(fit.c), format_double(fit.residual)});
  t.add_row({"two-bump", format_double(fit.c), format_double(cross)});
  s.csv("inversion", t);
  s.report()["c"] = fit.c;
  s.report()["gaussian_residual"] = fit.residual;
  s.report()["two_bump_residual"] = cross;
  s.less("gaussian.residual", fit.residual, tol);
  s.less("two_bump.residual", cross, tol);

  if (s.cfg().plot) {
    const std::vector<double> b = filtered_backprojection_3d(two, is, rs);
    SvgPlot plot = make_plot("Inversion profile along x_1 (two-bump)", "x_1", "value");
    SvgSeries a{"phi", {}, {}}, r{"c R*(-d^2)R phi", {}, {}};
    const std::size_t mid = static_cast<std::size_t>(n / 2);
    for (int i = 0; i < n; ++i) {
      const std::size_t flat = (static_cast<std::size_t>(i) * n + mid) * n + mid;
      const double x = two.node(flat)(0);
      a.x.push_back(x);
      a.y.push_back(two.samples()[flat]);
      r.x.push_back(x);
      r.y.push_back(fit.c * b[flat]);
    }
    plot.series = {a, r};
    s.svg("inversion", plot);
  }
}

// Hadamard finite part of int_0^inf x^gamma phi(x) dx. On [0, 1] the Taylor
// remainder is written in integral form, x^k / (k-1)! int_0^1 (1-u)^{k-1}
// phi^{(k)}(u x) du, so nothing cancels near 0; then x = t^2.
double finite_part_oracle(double gamma, const BumpFunction& phi) {
  const auto jet = phi.derivatives(0.0);
  const int k = static_cast<int>(std::floor(-gamma - 1.0)) + 1;
  require(k >= 1 && k <= 3, ErrorCode::ConfigError, "finite-part oracle needs -4 < gamma < -1");
  const double kfact = std::tgamma(static_cast<double>(k));
  const Rule1D outer = composite_gauss(0.0, 1.0, 32, 16);
  const Rule1D inner = composite_gauss(0.0, 1.0, 8, 16);
  double total = outer.integrate([&](double t) {
    const double x = t * t;
    const double rem = inner.integrate([&](double u) { return std::pow(1.0 - u, k - 1) * phi.derivatives(u * x)[k]; });
    return 2.0 * t * std::pow(x, gamma + k) * rem / kfact;
  });
  const double hi = phi.center()(0) + phi.radius();
  if (hi > 1.0) total += composite_gauss(1.0, hi, 64, 16).integrate([&](double x) { return std::pow(x, gamma) * phi(x); });
  double fact = 1.0;
  for (int j = 0; j < k; ++j) {
    if (j > 0) fact *= j;
    total += jet[j] / (fact * (gamma + j + 1.0));
  }
  return total;
}

void run_extend_homog(Params& p, Session& s) {
  const std::vector<double> gammas = p.nums("gammas", {-1.5, -2.5});
  const std::vector<double> lambdas = p.nums("lambdas", {0.5, 2.0});
  const double center = p.num("phi_center", 0.3);
  const double radius = p.num("phi_radius", 1.0);
  const double singular_gamma = p.num("singular_gamma", -1.0);
  const double tol = s.tol(p.num("tolerance", 1e-8));
  const double fp_tol = s.tol(p.num("finite_part_tolerance", 1e-6));
  const double ratio = p.num("singular_ratio", 0.1);
  p.finish();
  const BumpFunction phi = BumpFunction::on_line(center, radius);
  if (!(std::abs(phi(0.0)) > 0)) config_error("extend-homog needs phi(0) != 0");

  CsvTable t({"gamma", "lambda", "pairing", "scaled_pairing", "defect"});
  double worst = 0.0, worst_fp = 0.0;
  for (double g : gammas) {
    if (is_integer(g) && g <= -1) config_error("gammas must avoid negative integers; use singular_gamma");
    const double base = extend_halfline(g, phi);
    for (double l : lambdas) {
      const double def = homogeneity_defect(g, phi, l);
      t.add_row({g, l, base, extend_halfline(g, phi.scaled(l)), def});
      worst = std::max(worst, def);
    }
    const double fp = finite_part_oracle(g, phi);
    s.report()["finite_part"][format_double(g)] = Json{{"extension", base}, {"oracle", fp}};
    worst_fp = std::max(worst_fp, std::abs(base - fp));
  }
  const double sp = extend_halfline(singular_gamma, phi);
  double sing_def = 0.0;
  for (double l : lambdas) {
    const double def = homogeneity_defect(singular_gamma, phi, l);
    t.add_row({singular_gamma, l, sp, extend_halfline(singular_gamma, phi.scaled(l)), def});
    sing_def = std::max(sing_def, def);
  }
  s.csv("homogeneity", t);
  s.report()["max_defect"] = worst;
  s.report()["singular"] = Json{{"gamma", singular_gamma}, {"pairing", sp}, {"defect", sing_def}};
  s.less("homogeneity_defect", worst, tol);
  s.less("finite_part_error", worst_fp, fp_tol);
  s.greater("singular_defect/|pairing|", sing_def / std::max(std::abs(sp), 1e-300), ratio);

  SvgPlot plot = make_plot("Scaled pairings <x_+^gamma, phi(./lambda)> / lambda^(gamma+1)", "lambda", "ratio");
  plot.log_x = true;
  for (double g : std::vector<double>{gammas.empty() ? -1.5 : gammas.front(), singular_gamma}) {
    const double base = extend_halfline(g, phi);
    SvgSeries ser{"gamma " + short_num(g), {}, {}};
    for (int i = 0; i <= 24; ++i) {
      const double l = std::pow(10.0, -0.6 + 1.2 * i / 24.0);
      ser.x.push_back(l);
      ser.y.push_back(extend_halfline(g, phi.scaled(l)) / (std::pow(l, g + 1.0) * base));
    }
    plot.series.push_back(ser);
  }
  s.svg("homogeneity", plot);
}

void run_projective(Params& p, Session& s) {
  const int n_lines = p.integer("n_lines", 8);
  const int n_samples = p.integer("n_samples", 32);
  std::vector<std::string> names = p.strs("phantoms", {"cone-gaussian", "bump"});
  SinogramSampling smp{2, p.integer("n_omega", 36), p.num("p_min", -4.0), p.num("p_max", 4.0), p.integer("n_p", 33)};
  const double tol = s.tol(p.num("tolerance", 1e-4));
  const double agree_tol = s.tol(p.num("agreement_tolerance", 1e-3));
  p.finish();
  if (n_lines < 1 || n_samples < 2) config_error("projective-check needs n_lines >= 1 and n_samples >= 2");
  try {
    smp.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }

  // factorization of the hyperplane Jacobian on random lines of y-space
  Philox rng(s.cfg().seed, 3);
  double worst = 0.0;
  CsvTable ft({"line", "omega_0", "omega_1", "p", "defect"});
  for (int i = 0; i < n_lines; ++i) {
    const Direction w = Direction::from_angle(2.0 * pi * rng.uniform());
    const double off = -0.6 + 1.2 * rng.uniform();
    const Hyperplane lt{w, off};
    const Vector e = orthonormal_complement(w.vec()).col(0);
    Matrix ys(2, n_samples);
    for (int j = 0; j < n_samples; ++j) {
      Vector y = off * w.vec() + (-1.5 + 3.0 * j / (n_samples - 1)) * e;
      ys.col(j) = y;
    }
    // keep the samples away from the image of infinity y_2 = 1
    for (int j = 0; j < n_samples; ++j)
      if (std::abs(1.0 - ys(1, j)) < 0.05) ys.col(j) = off * w.vec() - 1.6 * e;
    const double def = factorization_defect(lt, ys);
    ft.add_row({std::to_string(i), format_double(w(0)), format_double(w(1)), format_double(off), format_double(def)});
    worst = std::max(worst, def);
  }
  s.csv("factorization", ft);
  s.report()["factorization_defect"] = worst;
  s.less("factorization_defect", worst, tol);

  CsvTable at({"phantom", "omega_index", "omega_0", "omega_1", "p", "rf_x", "rf_y", "rel_diff"});
  SvgPlot plot = make_plot("Radon data in x-space and y-space", "p", "Rf");
  for (const auto& name : names) {
    MeasureModel m = [&]() -> MeasureModel {
      if (name == "cone-gaussian") return named_phantom(name, 2, 0, 0).model;
      if (name == "bump") {
        Vector c(2);
        c << -0.3, 1.5;
        return AnalyticDensity::bump(BumpFunction(c, 0.8));
      }
      if (name == "grid-cone") {
        Vector c(2);
        c << 0.2, 1.2;
        const auto cg = AnalyticDensity::cone_gaussian(2, 0.5, 1.0, c);
        return GridDensity::sample(2, 256, 4.0, [&](const Vector& x) { return cg(x); });
      }
      config_error("projective-check phantom must be cone-gaussian, bump or grid-cone");
    }();
    const RadonDataPair r = transform_radon_data(m, smp, s.radon());
    const double scale = std::max(r.x_space.values.cwiseAbs().maxCoeff(), 1e-300);
    for (Eigen::Index i = 0; i < r.x_space.values.rows(); ++i)
      for (Eigen::Index j = 0; j < r.x_space.values.cols(); ++j) {
        const double a = r.x_space.values(i, j), b = r.y_space.values(i, j);
        at.add_row({name, std::to_string(i), format_double(r.x_space.directions(0, i)),
                    format_double(r.x_space.directions(1, i)), format_double(r.x_space.offsets[j]), format_double(a),
                    format_double(b), format_double(std::abs(a - b) / scale)});
      }
    s.report()["agreement"][name] = r.rel_diff;
    s.less(name + ".rel_diff", r.rel_diff, agree_tol);
    const Eigen::Index row = smp.n_omega / 4;
    SvgSeries sx{name + " x-space", r.x_space.offsets, {}}, sy{name + " y-space", r.y_space.offsets, {}};
    for (Eigen::Index j = 0; j < r.x_space.values.cols(); ++j) {
      sx.y.push_back(r.x_space.values(row, j));
      sy.y.push_back(r.y_space.values(row, j));
    }
    plot.series.push_back(sx);
    plot.series.push_back(sy);
  }
  s.csv("agreement", at);
  s.svg("agreement", plot);
}

// ---------------------------------------------------------------------------

void run_invisible(Params& p, Session& s) {
  std::vector<std::string> kinds = p.strs("kind", {"all"});
  if (kinds == std::vector<std::string>{"all"}) kinds = {"inverse_zk", "meanzero_homog", "derivative_trick"};
  InvisibleParams ip;
  ip.dim = p.integer("d", 2);
  ip.k = p.integer("k", 2);
  ip.imaginary = p.flag("imaginary", false);
  ip.n = p.integer("n", 2);
  ip.a = p.num("a", 1.0);
  ip.b = p.num("b", 0.0);
  std::vector<double> beta = p.nums("beta", {});
  for (double b : beta) ip.beta.push_back(static_cast<int>(b));
  const int n_lines = p.integer("n_lines", 100);
  const double p_min = p.num("p_min", 0.5), p_max = p.num("p_max", 5.0);
  const double tol = s.tol(p.num("tolerance", 1e-6));
  const double control_p = p.num("control_p", 0.5);
  const double control_bound = p.num("control_bound", 0.1);
  p.finish();
  if (n_lines < 1 || !(0 < p_min && p_min <= p_max)) config_error("invisible needs n_lines >= 1 and 0 < p_min <= p_max");

  const auto lines = random_hyperplanes(ip.dim, static_cast<std::size_t>(n_lines), p_min, p_max, s.cfg().seed);
  std::vector<std::string> header{"kind", "line"};
  for (int k = 0; k < ip.dim; ++k) header.push_back("omega_" + std::to_string(k));
  for (const char* c : {"p", "integral", "scale"}) header.emplace_back(c);
  CsvTable t(header);
  SvgPlot plot = make_plot("Hyperplane integrals of invisible densities", "|p|", "|integral| / scale");
  plot.log_y = true;
  for (const auto& kname : kinds) {
    InvisibleKind kind;
    try {
      kind = invisible_kind_from_string(kname);
    } catch (const Error& e) {
      config_error(e.what());
    }
    if (kind == InvisibleKind::halfspace_supported_3d) config_error("use 'counterexample halfspace3d' for the 3-D measure");
    if (kind == InvisibleKind::inverse_zk && ip.dim != 2) config_error("inverse_zk is defined for d = 2");
    InvisibleParams kp = ip;
    if (kind == InvisibleKind::derivative_trick && kp.beta.empty()) {
      kp.beta.assign(static_cast<std::size_t>(kp.dim), 0);
      kp.beta[0] = 1;
    }
    const AnalyticDensity f = make_invisible(kind, kp);
    const LineCertificate c = certify_invisible(f, lines, p_min, s.radon());
    SvgSeries ser{kname, {}, {}};
    for (std::size_t i = 0; i < lines.size(); ++i) {
      std::vector<std::string> row{kname, std::to_string(i)};
      for (int k = 0; k < ip.dim; ++k) row.push_back(format_double(lines[i].omega(k)));
      row.push_back(format_double(lines[i].p));
      row.push_back(format_double(c.values[i]));
      row.push_back(format_double(c.scales[i]));
      t.add_row(row);
      ser.x.push_back(std::abs(lines[i].p));
      ser.y.push_back(std::max(std::abs(c.values[i]) / c.scales[i], 1e-18));
    }
    plot.series.push_back(ser);
    s.report()["kinds"][kname] = Json{{"max_abs", c.max_abs}, {"max_relative", c.max_relative},
                                      {"max_tail_ratio", c.max_tail_ratio}};
    s.less(kname + ".max_relative", c.max_relative, tol);
    s.less(kname + ".max_abs", c.max_abs, tol);
  }
  // the Gaussian is visible: a nonzero integral on a line missing the origin
  Vector wc = Vector::Zero(ip.dim);
  wc(0) = 1.0;
  const double control =
      std::abs(hyperplane_integral(AnalyticDensity::gaussian(ip.dim), Hyperplane{Direction(wc), control_p}, s.radon()).value);
  s.report()["gaussian_control"] = control;
  s.greater("gaussian_control", control, control_bound);
  plot.h_lines.push_back(tol);
  s.csv("lines", t);
  s.svg("lines", plot);
}

void run_halfspace3d(Params& p, Session& s) {
  const int n = p.integer("n_halfspaces", 50);
  const double p_lo = p.num("p_lo", -3.0), p_hi = p.num("p_hi", -0.5);
  const int nodes = p.integer("angular_nodes", 256);
  const double tol = s.tol(p.num("tolerance", 1e-5));
  const double control_bound = p.num("control_bound", 0.1);
  p.finish();
  if (n < 1 || !(p_lo <= p_hi && p_hi < 0)) config_error("halfspace3d needs p_lo <= p_hi < 0");

  const auto hs = random_halfspaces(3, static_cast<std::size_t>(n), p_lo, p_hi, s.cfg().seed);
  const auto h = make_invisible(InvisibleKind::halfspace_supported_3d);
  auto trace = [&](const Vector& x) { return h.trace(x); };
  auto trace_abs = [&](const Vector& x) { return std::abs(h.trace(x)); };
  CsvTable t({"halfspace", "omega_0", "omega_1", "omega_2", "p", "mass", "abs_trace_mass"});
  SvgSeries sm{"mu(H)", {}, {}}, sc{"|h| control", {}, {}};
  double worst = 0.0, control = 0.0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const double m = halfspace_trace_mass(trace, hs[i], nodes);
    const double c = halfspace_trace_mass(trace_abs, hs[i], nodes);
    t.add_row({std::to_string(i), format_double(hs[i].omega(0)), format_double(hs[i].omega(1)),
               format_double(hs[i].omega(2)), format_double(hs[i].p), format_double(m), format_double(c)});
    worst = std::max(worst, std::abs(m));
    control = std::max(control, c);
    sm.x.push_back(hs[i].p);
    sm.y.push_back(m);
    sc.x.push_back(hs[i].p);
    sc.y.push_back(c);
  }
  s.csv("halfspaces", t);
  s.report()["max_abs_mass"] = worst;
  s.report()["abs_trace_control"] = control;
  s.less("max_abs_mass", worst, tol);
  s.greater("abs_trace_control", control, control_bound);
  SvgPlot plot = make_plot("Halfspace masses of the trace measure", "p", "mass");
  plot.series = {sm, sc};
  s.svg("halfspaces", plot);
}

void run_proposition(Params& p, Session& s) {
  const int m = p.integer("m", 1);
  const double angle = p.num("omega_angle", 0.4);
  const double hp = p.num("p", -1.0);
  const std::vector<double> decades = p.nums("decades", {3, 4, 5, 6, 7, 8, 9});
  const std::vector<double> phi_c = p.nums("phi_center", {2.0 * std::cos(pi / 3), 2.0 * std::sin(pi / 3)});
  const double phi_r = p.num("phi_radius", 0.5);
  const std::vector<double> phases = p.nums("phases", {pi / 2, 3 * pi / 2});
  const double rtol = s.tol(p.num("rtol", 1e-3));
  p.finish();
  if (phi_c.size() != 2 || hp >= 0) config_error("proposition needs a 2-D phi_center and p < 0");

  const PropositionG g = PropositionG::make(m);
  ScanRequest hr;
  hr.mode = ScanMode::halfspace;
  hr.halfspace = Halfspace{Direction::from_angle(angle), hp};
  std::vector<double> lts;
  for (double dcd : decades) lts.push_back(dcd * std::log(10.0));
  const auto hpts = scan_limits(g, hr, lts);
  CsvTable t({"mode", "log_t", "value", "baseline"});
  double spread = 0.0;
  for (const auto& a : hpts) {
    t.add_row({"halfspace", format_double(a.log_t), format_double(a.value), format_double(a.baseline)});
    for (const auto& b : hpts) spread = std::max(spread, std::abs(a.value - b.value) / std::max(std::abs(b.value), 1e-300));
  }
  s.report()["C"] = g.C;
  s.report()["halfspace_cauchy_spread"] = spread;
  s.less("halfspace.cauchy_rel", spread, rtol);

  // c = int h phi by a tensor Gauss rule over the bump's box
  const BumpFunction phi(to_vector(phi_c), phi_r);
  double c = 0.0;
  {
    const Rule1D rx = composite_gauss(phi_c[0] - phi_r, phi_c[0] + phi_r, 16, 16);
    const Rule1D ry = composite_gauss(phi_c[1] - phi_r, phi_c[1] + phi_r, 16, 16);
    Vector y(2);
    for (std::size_t i = 0; i < rx.size(); ++i)
      for (std::size_t j = 0; j < ry.size(); ++j) {
        y << rx.nodes[i], ry.nodes[j];
        c += rx.weights[i] * ry.weights[j] * g.h(y) * phi(y);
      }
  }
  ScanRequest tr;
  tr.mode = ScanMode::testfn;
  tr.phi = phi;
  std::vector<double> tl;
  for (double ph : phases) tl.push_back(log_t_for_phase(ph));
  const auto tpts = scan_limits(g, tr, tl);
  double above = -kInf, below = kInf;
  Json tv = Json::array();
  for (const auto& a : tpts) {
    t.add_row({"testfn", format_double(a.log_t), format_double(a.value), format_double(a.baseline)});
    above = std::max(above, a.value - a.baseline);
    below = std::min(below, a.value - a.baseline);
    tv.push_back(Json{{"log_t", a.log_t}, {"oscillating_part", a.value - a.baseline}});
  }
  s.csv("scan", t);
  s.report()["c"] = c;
  s.report()["testfn"] = tv;
  s.greater("testfn.max_minus_c", above - std::abs(c), 0.0);
  s.greater("testfn.neg_c_minus_min", -std::abs(c) - below, 0.0);

  if (s.cfg().plot) {
    std::vector<double> ll;
    for (int i = 0; i <= 80; ++i) ll.push_back(std::exp(1.2 + (8.0 - 1.2) * i / 80.0));
    const auto trace = scan_limits(g, tr, ll);
    SvgSeries ser{"t^(m+2) <g(t.), phi> - baseline", {}, {}};
    for (const auto& a : trace) {
      ser.x.push_back(std::log(a.log_t));
      ser.y.push_back(a.value - a.baseline);
    }
    SvgPlot plot = make_plot("Oscillation of the scaled test-function pairing", "log log t", "value");
    plot.series = {ser};
    plot.h_lines = {c, -c};
    s.svg("scan", plot);
  }
}

// ---------------------------------------------------------------------------

SpectralMeasure orthant_spectral() {
  Matrix at(2, 3);
  at << 1.0, std::cos(pi / 4), 0.0, 0.0, std::sin(pi / 4), 1.0;
  Vector w(3);
  w << 0.3, 0.4, 0.3;
  return SpectralMeasure(at, w);
}

Json spectral_json(const SpectralMeasure& S) {
  Json a = Json::array();
  for (Eigen::Index j = 0; j < S.size(); ++j)
    if (S.weights(j) > 0) a.push_back(Json{{"direction", vec_json(S.atoms.col(j))}, {"weight", S.weights(j)}});
  return a;
}

void run_regvar_estimate(Params& p, Session& s) {
  std::vector<std::string> cases = p.strs("case", {"orthant", "proposition"});
  const double beta = p.num("beta", 2.0);
  const int n = p.integer("n", 100000);
  const int k = p.integer("k", 0);
  const double t_level = p.num("t", 10.0);
  const int n_dirs = p.integer("n_directions", 64);
  const int m = p.integer("m", 2);
  p.finish();
  if (n < 10 || n_dirs < 8 || !(beta > 0) || !(t_level >= 1)) config_error("regvar estimate: bad sizes");
  const Matrix dirs = uniform_directions(2, n_dirs);

  SvgPlot plot = make_plot("Tail limit function b(omega)", "angle", "b");
  for (const auto& c : cases) {
    TailLimitFunction b{dirs, Vector::Zero(n_dirs)};
    Json rep;
    std::string expected;
    if (c == "orthant" || c == "uniform") {
      const SampleSet xs = pareto_samples(2, beta, static_cast<std::size_t>(n), s.cfg().seed,
                                          c == "orthant" ? orthant_spectral() : SpectralMeasure{});
      const TailIndex ti = tail_index_estimate(xs, k);
      const double scale = std::pow(t_level, beta) / static_cast<double>(n);
      for (int i = 0; i < n_dirs; ++i) {
        const Vector w = dirs.col(i);
        const auto proj = w.transpose() * xs.samples;
        b.values(i) = scale * static_cast<double>((proj.array() < -t_level).count());
      }
      rep["beta_hat"] = ti.beta_hat;
      rep["ci"] = {ti.ci_lo, ti.ci_hi};
      rep["k"] = ti.k;
      CsvTable dump({"index", "x_0", "x_1"});
      for (Eigen::Index j = 0; j < std::min<Eigen::Index>(xs.size(), 1000); ++j)
        dump.add_row({static_cast<double>(j), xs.samples(0, j), xs.samples(1, j)});
      s.csv("samples_" + c, dump);
      expected = c == "orthant" ? "vanishes_on_open_set" : "neither";
    } else if (c == "proposition") {
      // t^{m+2} int_H g(t x) dx at t = 1e9 for every direction, p = -1
      const PropositionG g = PropositionG::make(m);
      const double lt = 9.0 * std::log(10.0);
      for (int i = 0; i < n_dirs; ++i) {
        ScanRequest r;
        r.halfspace = Halfspace{Direction(Vector(dirs.col(i))), -1.0};
        b.values(i) = scan_limits(g, r, {lt})[0].value;
      }
      rep["m"] = m;
      expected = "neither";
    } else {
      config_error("regvar estimate case must be orthant, uniform or proposition");
    }
    const double b_beta = c == "proposition" ? static_cast<double>(m) : beta;
    const Cor2Report cor = check_cor2_conditions(b, b_beta);
    SpectralInverseSettings sis;
    sis.residual_tolerance = kInf;
    const SpectralInverseReport inv = spectral_inverse(b, b_beta, n_dirs, sis);
    rep["beta"] = b_beta;
    rep["cor2_condition"] = to_string(cor.condition);
    rep["warning"] = cor.warning;
    rep["condition_number"] = inv.condition_number;
    rep["inverse_residual"] = inv.residual;
    rep["spectral_atoms"] = spectral_json(inv.S);
    s.report()["cases"][c] = rep;
    s.truth(c + ".cor2=" + expected, expected == to_string(cor.condition));
    if (expected == "neither") s.truth(c + ".warning", !cor.warning.empty());

    CsvTable bt({"omega_0", "omega_1", "b"});
    SvgSeries ser{c, {}, {}};
    for (int i = 0; i < n_dirs; ++i) {
      bt.add_row({dirs(0, i), dirs(1, i), b.values(i)});
      ser.x.push_back(std::atan2(dirs(1, i), dirs(0, i)));
      ser.y.push_back(b.values(i));
    }
    s.csv("b_" + c, bt);
    plot.series.push_back(ser);
  }
  s.svg("tail_limit", plot);
}

void run_regvar_spectral(Params& p, Session& s) {
  const std::vector<double> betas = p.nums("betas", {0.7, 1.3, 1.5, 2.4});
  std::vector<std::string> shapes = p.strs("shapes", {"two_atom", "uniform"});
  const int n = p.integer("n_directions", 64);
  const double tol = s.tol(p.num("tolerance", 0.05));
  const double int_beta = p.num("integral_beta", 1.0);
  const double ref_beta = p.num("reference_beta", 1.3);
  const double ratio_bound = p.num("ratio_bound", 10.0);
  p.finish();
  if (n < 8) config_error("regvar spectral needs n_directions >= 8");

  const Matrix dirs = uniform_directions(2, n);
  CsvTable t({"shape", "beta", "l1_error", "residual", "condition_number", "iterations"});
  SvgPlot plot = make_plot("Recovered spectral weights", "direction index", "weight");
  for (const auto& shape : shapes) {
    Vector w = Vector::Zero(n);
    if (shape == "two_atom") {
      w(5 % n) = 1.0;
      w((5 * n / 8) % n) = 0.5;
    } else if (shape == "uniform") {
      w.setConstant(1.0 / n);
    } else {
      config_error("spectral shape must be two_atom or uniform");
    }
    const SpectralMeasure S(dirs, w);
    for (double beta : betas) {
      const auto b = TailLimitFunction::from_spectral(S, beta, dirs);
      const SpectralInverseReport r = spectral_inverse(b, beta, n);
      const double l1 = (r.S.weights - w).lpNorm<1>() / w.lpNorm<1>();
      t.add_row({shape, format_double(beta), format_double(l1), format_double(r.residual),
                 format_double(r.condition_number), std::to_string(r.iterations)});
      s.report()["l1_error"][shape][format_double(beta)] = l1;
      s.less(shape + ".beta=" + short_num(beta) + ".l1", l1, tol);
      if (&beta == &betas.back()) {
        SvgSeries truth{shape + " true", {}, {}}, rec{shape + " beta " + short_num(beta), {}, {}};
        for (int i = 0; i < n; ++i) {
          truth.x.push_back(i);
          truth.y.push_back(w(i));
          rec.x.push_back(i);
          rec.y.push_back(r.S.weights(i));
        }
        plot.series.push_back(truth);
        plot.series.push_back(rec);
      }
    }
  }
  const double c_int = condition_number(spectral_design(dirs, dirs, int_beta));
  const double c_ref = condition_number(spectral_design(dirs, dirs, ref_beta));
  s.report()["condition"] = Json{{"integral_beta", int_beta}, {"reference_beta", ref_beta},
                                 {"integral", c_int}, {"reference", c_ref}, {"ratio", c_int / c_ref}};
  s.greater("condition_ratio", c_int / c_ref, ratio_bound);
  s.csv("spectral", t);
  s.svg("spectral", plot);
}

std::vector<int> hill_grid(Eigen::Index n) {
  std::vector<int> ks;
  for (double k = 10; k < 0.2 * static_cast<double>(n); k *= 1.5) ks.push_back(static_cast<int>(k));
  return ks;
}

void hill_plot(Session& s, const SampleSet& xs, double target, const std::string& name) {
  if (!s.cfg().plot) return;
  SvgSeries ser{"Hill estimate", {}, {}};
  for (int k : hill_grid(xs.size())) {
    ser.x.push_back(k);
    ser.y.push_back(tail_index_estimate(xs, k).beta_hat);
  }
  SvgPlot plot = make_plot("Hill plot", "k", "beta_hat");
  plot.log_x = true;
  plot.series = {ser};
  plot.h_lines = {target};
  s.svg(name, plot);
}

void tail_dump(Session& s, const SampleSet& xs, int k, const std::string& name) {
  std::vector<double> r(static_cast<std::size_t>(xs.size()));
  for (Eigen::Index j = 0; j < xs.size(); ++j) r[static_cast<std::size_t>(j)] = xs.samples.col(j).norm();
  const std::size_t top = std::min(r.size(), static_cast<std::size_t>(2 * std::max(k, 1)));
  std::partial_sort(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(top), r.end(), std::greater<>());
  CsvTable t({"rank", "radius"});
  for (std::size_t i = 0; i < top; ++i) t.add_row({static_cast<double>(i + 1), r[i]});
  s.csv(name, t);
}

void run_regvar_kesten(Params& p, Session& s) {
  const int n = p.integer("n", 1000000);
  const int k = p.integer("k", 0);
  const double hi = p.num("m_high", 2.0), lo = p.num("m_low", 0.5);
  const double prob_hi = p.num("p_high", 0.3);
  const double rel = s.tol(p.num("tolerance", 0.15));
  p.finish();
  if (n < 100 || !(0 < prob_hi && prob_hi < 1) || !(hi > 1 && lo > 0 && lo < 1)) config_error("regvar kesten: bad parameters");

  KestenParams kp = kesten_scalar_example(n);
  kp.m_values = {Matrix::Constant(1, 1, hi), Matrix::Constant(1, 1, lo)};
  kp.m_probs = {prob_hi, 1.0 - prob_hi};
  // E[M^beta] = 1 has the trivial root 0; the tail index is the positive one
  auto moment = [&](double b) { return prob_hi * std::pow(hi, b) + (1.0 - prob_hi) * std::pow(lo, b) - 1.0; };
  require(prob_hi * std::log(hi) + (1.0 - prob_hi) * std::log(lo) < 0, ErrorCode::ConfigError,
          "E[log M] must be negative for a stationary solution");
  double upper = 1.0;
  while (moment(upper) <= 0 && upper < 1e3) upper *= 2;
  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(moment, upper / 2 > 1e-6 && moment(upper / 2) < 0 ? upper / 2 : 1e-6,
                                                      upper, boost::math::tools::eps_tolerance<double>(52), iters);
  const double target = 0.5 * (root.first + root.second);

  const SampleSet xs = kesten_simulate(kp, s.cfg().seed);
  const TailIndex ti = tail_index_estimate(xs, k);
  const double err = std::abs(ti.beta_hat - target) / target;
  s.report()["target"] = target;
  s.report()["beta_hat"] = ti.beta_hat;
  s.report()["ci"] = {ti.ci_lo, ti.ci_hi};
  s.report()["k"] = ti.k;
  s.report()["relative_error"] = err;
  s.report()["seed"] = s.cfg().seed;
  s.report()["generator"] = xs.generator_id;
  s.less("relative_error", err, rel);
  tail_dump(s, xs, ti.k, "tail");
  hill_plot(s, xs, target, "hill");
}

void run_regvar_stable(Params& p, Session& s) {
  const double beta = p.num("beta", 1.5);
  const int n = p.integer("n", 1000000);
  const int block = p.integer("block", 100);
  const int k = p.integer("k", 0);
  const double half = s.tol(p.num("half_width", 0.2));
  p.finish();
  if (n < 10 * block || block < 1 || !(beta > 0)) config_error("regvar stable needs n >= 10 block and beta > 0");

  const SampleSet raw = pareto_samples(2, beta, static_cast<std::size_t>(n), s.cfg().seed);
  const SampleSet sums = stable_sum_demo(raw, beta, block);
  const TailIndex ti = tail_index_estimate(sums, k);
  s.report()["beta_hat"] = ti.beta_hat;
  s.report()["ci"] = {ti.ci_lo, ti.ci_hi};
  s.report()["k"] = ti.k;
  s.report()["n_blocks"] = sums.size();
  s.greater("beta_hat_above", ti.beta_hat, beta - half);
  s.less("beta_hat_below", ti.beta_hat, beta + half);
  tail_dump(s, sums, ti.k, "tail");
  hill_plot(s, sums, beta, "hill");
}

// ---------------------------------------------------------------------------

void table_csv(Session& s, const LimitTable& t, const std::string& name, const std::string& title) {
  CsvTable c({"k", "functional", "value"});
  SvgPlot plot = make_plot(title, "k", "value");
  plot.log_x = true;
  for (const auto& row : t.rows) {
    SvgSeries ser{row.label, {}, {}};
    for (std::size_t i = 0; i < t.k_values.size(); ++i) {
      c.add_row({std::to_string(t.k_values[i]), row.label, format_double(row.values[i])});
      ser.x.push_back(t.k_values[i]);
      ser.y.push_back(row.values[i]);
    }
    plot.series.push_back(ser);
  }
  for (std::size_t i = 0; i < t.k_values.size(); ++i)
    c.add_row({std::to_string(t.k_values[i]), "norm", format_double(t.norms[i])});
  s.csv(name, c);
  s.svg(name, plot);
}

Json table_json(const LimitTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json j{{"label", r.label}, {"limit", r.limit}, {"flag", to_string(r.flag)}};
    if (r.reference) j["reference"] = *r.reference;
    if (r.residual) j["residual"] = *r.residual;
    rows.push_back(j);
  }
  return Json{{"rows", rows}, {"norm_bound_violated", t.norm_bound_violated}, {"all_converged", t.all_converged()}};
}

std::vector<int> k_grid_param(Params& p) {
  std::vector<double> ks = p.nums("k_values", {});
  if (ks.empty()) return default_k_grid();
  std::vector<int> out;
  for (double k : ks) {
    if (!(k >= 1) || !is_integer(k)) config_error("k_values must be positive integers");
    out.push_back(static_cast<int>(k));
  }
  if (out.size() < 3) config_error("k_values needs at least three entries");
  return out;
}

void run_weakconv_table(Params& p, Session& s) {
  const std::string seq = p.str("sequence", "derivative_blowup");
  const std::vector<int> ks = k_grid_param(p);
  const double tol = s.tol(p.num("tolerance", 1e-3));
  const std::vector<double> offsets = p.nums("halfspace_offsets", {0.3, -0.2});
  p.finish();
  LimitSettings ls;
  ls.radon = s.radon();
  ls.quad = s.cfg().quadrature;

  if (seq == "derivative_blowup") {
    const auto mseq = MeasureSequence::derivative_blowup();
    std::vector<Halfspace> hs;
    Vector one(1);
    one << 1.0;
    for (double c : offsets) {
      if (c == 0) config_error("halfspace offsets must be nonzero");
      hs.push_back({Direction(one), c});
      hs.push_back({Direction(Vector(-one)), -c});
    }
    const LimitTable ht = halfspace_limit_table(mseq, hs, ks, ls);
    const BumpFunction phi = BumpFunction::on_line(0.3, 1.0);
    const LimitTable tt = testfn_limit_table(mseq, {phi}, ks, std::nullopt, ls);
    const double reference = -phi.derivatives(0.0)[1];
    double worst = 0.0;
    bool converged = true;
    for (const auto& r : ht.rows) {
      worst = std::max(worst, std::abs(r.limit));
      converged = converged && r.flag == LimitFlag::converged;
    }
    const double resid = std::abs(tt.rows[0].limit - reference);
    s.report()["halfspace"] = table_json(ht);
    s.report()["testfn"] = table_json(tt);
    s.report()["testfn_reference"] = reference;
    s.less("halfspace.max_abs_limit", worst, tol);
    s.truth("halfspace.converged", converged);
    s.less("testfn.residual", resid, tol);
    s.truth("norm_bound_violated", ht.norm_bound_violated);
    table_csv(s, ht, "halfspace", "Halfspace values mu_k(H)");
    table_csv(s, tt, "testfn", "Pairings <mu_k, phi>");
  } else if (seq == "shrinking_atom") {
    Vector a(2);
    a << 1.0, 0.0;
    const auto mseq = MeasureSequence::shrinking_atom(a);
    const LimitTable ht = halfspace_limit_table(mseq, {Halfspace{Direction::axis(2, 0), 0.1}}, ks, ls);
    const LimitTable tt = testfn_limit_table(mseq, {BumpFunction(Vector(Vector::Zero(2)), 1.0)}, ks,
                                             MeasureModel(AtomicMeasure::dirac(Vector::Zero(2))), ls);
    s.report()["halfspace"] = table_json(ht);
    s.report()["testfn"] = table_json(tt);
    s.truth("halfspace.converged", ht.all_converged());
    s.less("halfspace.limit_error", std::abs(ht.rows[0].limit - 1.0), tol);
    s.less("testfn.residual", tt.rows[0].residual.value_or(kInf), tol);
    s.truth("norm_bound_respected", !ht.norm_bound_violated);
    table_csv(s, ht, "halfspace", "Halfspace values mu_k(H)");
    table_csv(s, tt, "testfn", "Pairings <mu_k, phi>");
  } else if (seq == "scaled_pareto") {
    const SpectralMeasure S = orthant_spectral();
    const auto mseq = MeasureSequence::scaled_pareto(S, 2.0);
    const Halfspace h{Direction::from_angle(3.5), -1.0};
    const LimitTable ht = halfspace_limit_table(mseq, {h}, ks, ls);
    const double oracle = spectral_forward(S, 2.0, h.omega);
    s.report()["halfspace"] = table_json(ht);
    s.report()["oracle"] = oracle;
    s.truth("halfspace.converged", ht.all_converged());
    s.less("halfspace.oracle_error", std::abs(ht.rows[0].limit - oracle), tol);
    table_csv(s, ht, "halfspace", "Halfspace values mu_k(H)");
  } else {
    config_error("weakconv sequence must be derivative_blowup, shrinking_atom or scaled_pareto");
  }
}

void run_weakconv_norms(Params& p, Session& s) {
  const std::string seq = p.str("sequence", "escaping_atom");
  const std::vector<int> ks = k_grid_param(p);
  p.finish();
  LimitSettings ls;
  ls.radon = s.radon();
  ls.quad = s.cfg().quadrature;

  Vector a(2);
  a << 1.0, 0.0;
  const BumpFunction phi(Vector(Vector::Zero(2)), 3.0);
  NormReport r;
  bool expect_violation;
  if (seq == "escaping_atom") {
    r = norm_continuity_check(MeasureSequence::escaping_atom(a), AtomicMeasure(Matrix(2, 0), Vector(0)), phi, ks, ls);
    expect_violation = true;
  } else if (seq == "shrinking_atom") {
    r = norm_continuity_check(MeasureSequence::shrinking_atom(a), AtomicMeasure::dirac(Vector::Zero(2)), phi, ks, ls);
    expect_violation = false;
  } else {
    config_error("weakconv norms sequence must be escaping_atom or shrinking_atom");
  }
  CsvTable t({"k", "functional", "value"});
  SvgPlot plot = make_plot("Norms and pairings", "k", "value");
  plot.log_x = true;
  SvgSeries sn{"norm", {}, {}}, sc{"<mu_k, phi>", {}, {}}, sb{"<mu_k, 1>", {}, {}};
  for (std::size_t i = 0; i < r.k_values.size(); ++i) {
    const std::string k = std::to_string(r.k_values[i]);
    t.add_row({k, "norm", format_double(r.norms[i])});
    t.add_row({k, "c0_pairing", format_double(r.c0_pairings[i])});
    t.add_row({k, "bounded_pairing", format_double(r.bounded_pairings[i])});
    for (auto* ser : {&sn, &sc, &sb}) ser->x.push_back(r.k_values[i]);
    sn.y.push_back(r.norms[i]);
    sc.y.push_back(r.c0_pairings[i]);
    sb.y.push_back(r.bounded_pairings[i]);
  }
  plot.series = {sn, sc, sb};
  s.csv("norms", t);
  s.svg("norms", plot);
  s.report()["limit_norm"] = r.limit_norm;
  s.report()["norms_converge"] = r.norms_converge;
  s.report()["c0_limit"] = r.c0_limit;
  s.report()["bounded_limit"] = r.bounded_limit;
  s.report()["bounded_converges"] = r.bounded_converges;
  s.report()["norm_condition_violated"] = r.norm_condition_violated;
  if (expect_violation) {
    s.truth("norm_condition_violated", r.norm_condition_violated);
    s.truth("bounded_pairing_fails", !r.bounded_converges);
  } else {
    s.truth("norms_converge", r.norms_converge);
    s.truth("bounded_pairing_converges", r.bounded_converges);
  }
}

using Runner = void (*)(Params&, Session&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> m{
      {"radon", run_radon},
      {"slice-check", run_slice_check},
      {"adjoint-check", run_adjoint_check},
      {"invert3d-check", run_invert3d},
      {"extend-homog", run_extend_homog},
      {"projective-check", run_projective},
      {"counterexample invisible", run_invisible},
      {"counterexample halfspace3d", run_halfspace3d},
      {"counterexample proposition", run_proposition},
      {"regvar estimate", run_regvar_estimate},
      {"regvar spectral", run_regvar_spectral},
      {"regvar kesten", run_regvar_kesten},
      {"regvar stable", run_regvar_stable},
      {"weakconv table", run_weakconv_table},
      {"weakconv norms", run_weakconv_norms},
  };
  return m;
}

std::string verdict_line(const ExperimentConfig& cfg, const std::vector<Check>& checks, bool pass) {
  std::string line = std::string(pass ? "PASS " : "FAIL ") + cfg.experiment + ":";
  for (const auto& c : checks) {
    line += ' ' + c.name;
    switch (c.op) {
      case Check::Op::less: line += '=' + short_num(c.value) + (c.passed ? "<" : ">=") + short_num(c.bound); break;
      case Check::Op::greater: line += '=' + short_num(c.value) + (c.passed ? ">" : "<=") + short_num(c.bound); break;
      case Check::Op::is_true: line += c.passed ? "=yes" : "=no"; break;
    }
  }
  return line;
}

Json quadrature_json(const QuadratureSettings& q) {
  return Json{{"radial_panels", q.radial_panels}, {"order", q.order}, {"angular_nodes", q.angular_nodes}};
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, fn] : runners()) v.push_back(k);
    return v;
  }();
  return names;
}

Json ExperimentConfig::to_json() const {
  return Json{{"experiment", experiment},   {"params", params}, {"quadrature", quadrature_json(quadrature)},
              {"seed", seed},               {"out", out},       {"threads", threads},
              {"tolerance_scale", tolerance_scale}, {"plot", plot}};
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  if (!j.is_object() || j.empty()) config_error("config must be a non-empty JSON object");
  reject_unknown_keys(j, {"experiment", "params", "quadrature", "seed", "out", "threads", "tolerance_scale", "plot"},
                      "config");
  ExperimentConfig c;
  try {
    if (!j.contains("experiment") || !j.at("experiment").is_string()) config_error("config.experiment must be a string");
    c.experiment = j.at("experiment").get<std::string>();
    if (!runners().count(c.experiment)) config_error("unknown experiment '" + c.experiment + "'");
    if (j.contains("params")) {
      if (!j.at("params").is_object()) config_error("config.params must be an object");
      c.params = j.at("params");
    }
    if (j.contains("quadrature")) {
      const Json& q = j.at("quadrature");
      reject_unknown_keys(q, {"radial_panels", "order", "angular_nodes"}, "config.quadrature");
      if (q.contains("radial_panels")) c.quadrature.radial_panels = q.at("radial_panels").get<int>();
      if (q.contains("order")) c.quadrature.order = q.at("order").get<int>();
      if (q.contains("angular_nodes")) c.quadrature.angular_nodes = q.at("angular_nodes").get<int>();
      if (c.quadrature.radial_panels < 1 || c.quadrature.order < 1 || c.quadrature.angular_nodes < 4)
        config_error("quadrature settings must be positive");
    }
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned()) config_error("config.seed must be a non-negative integer");
      c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("threads")) {
      if (!j.at("threads").is_number_integer() || j.at("threads").get<int>() < 1) config_error("config.threads must be >= 1");
      c.threads = j.at("threads").get<int>();
    }
    if (j.contains("tolerance_scale")) {
      c.tolerance_scale = j.at("tolerance_scale").get<double>();
      if (!(c.tolerance_scale > 0)) config_error("config.tolerance_scale must be positive");
    }
    if (j.contains("plot")) c.plot = j.at("plot").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("config: ") + e.what());
  }
  return c;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) { return a.to_json() == b.to_json(); }

Json error_json(const std::string& code, const std::string& message) {
  return Json{{"error", Json{{"code", code}, {"message", message}}}, {"schema", kSchemaVersion}};
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult r;
  r.report = Json::object();
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto it = runners().find(cfg.experiment);
    if (it == runners().end()) config_error("unknown experiment '" + cfg.experiment + "'");
    if (cfg.threads < 1 || !(cfg.tolerance_scale > 0)) config_error("threads and tolerance_scale must be positive");
    Session s(cfg, r);
    Params p(cfg.params);
    it->second(p, s);
    const bool pass = std::all_of(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.passed; });
    r.exit_code = pass ? 0 : 1;
    r.verdict = verdict_line(cfg, r.checks, pass);
    Json checks = Json::array();
    for (const auto& c : r.checks)
      checks.push_back(Json{{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"passed", c.passed}});
    Json config = cfg.to_json();
    config.erase("out");  // the output location must not change the bytes written
    r.report["experiment"] = cfg.experiment;
    r.report["config"] = config;
    r.report["checks"] = checks;
    r.report["verdict"] = pass ? "PASS" : "FAIL";
    s.json("report", r.report);
  } catch (const Error& e) {
    const bool config = e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::BadParams;
    r.exit_code = config ? 2 : 1;
    r.report = error_json(to_string(e.code()), e.what());
    r.verdict = std::string("FAIL ") + cfg.experiment + ": " + e.what();
  } catch (const std::exception& e) {
    r.exit_code = 2;
    r.report = error_json("ConfigError", e.what());
    r.verdict = std::string("FAIL ") + cfg.experiment + ": " + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace exradon::cli
