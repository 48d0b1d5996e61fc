#include "experiments.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using exradon::Json;
using exradon::cli::ExperimentConfig;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool plot = false;
  std::optional<int> threads;
  std::optional<double> tolerance_scale;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "experiment config (JSON)");
  app->add_option("--seed", f.seed, "random seed");
  app->add_option("--out", f.out, "output directory (EXRADON_OUT takes precedence)");
  app->add_flag("--plot", f.plot, "also write SVG plots");
  app->add_option("--threads", f.threads, "worker cap")->check(CLI::PositiveNumber);
  app->add_option("--tolerance-scale", f.tolerance_scale, "multiplier for every contract tolerance")
      ->check(CLI::PositiveNumber);
}

// "--key value" pairs left over by CLI11 become params; values that parse as
// JSON keep their type, anything else is a string.
Json extras_to_params(const std::vector<std::string>& extras) {
  Json params = Json::object();
  for (std::size_t i = 0; i < extras.size(); ++i) {
    std::string key = extras[i];
    if (key.rfind("--", 0) != 0 || key.size() < 3)
      throw exradon::Error(exradon::ErrorCode::ConfigError, "unexpected argument '" + key + "'");
    key = key.substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else if (i + 1 < extras.size() && extras[i + 1].rfind("--", 0) != 0) {
      value = extras[++i];
    } else {
      value = "true";
    }
    std::replace(key.begin(), key.end(), '-', '_');
    Json v = Json::parse(value, nullptr, false);
    params[key] = v.is_discarded() ? Json(value) : v;
  }
  return params;
}

Json read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw exradon::Error(exradon::ErrorCode::ConfigError, "cannot read config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  Json j = Json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw exradon::Error(exradon::ErrorCode::ConfigError, "config " + path + " is not valid JSON");
  return j;
}

int fail_config(const std::string& message) {
  std::cout << exradon::cli::error_json("ConfigError", message).dump() << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exterior Radon transform experiments"};
  app.require_subcommand(0, 1);
  CommonFlags flags;

  std::map<CLI::App*, std::string> leaves;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& path, const std::string& help) {
    CLI::App* sub = parent->add_subcommand(name, help);
    sub->allow_extras();
    add_common(sub, flags);
    leaves[sub] = path;
  };
  CLI::App* run = app.add_subcommand("run", "run the experiment described by --config");
  add_common(run, flags);
  leaf(&app, "radon", "radon", "forward transform of a phantom");
  leaf(&app, "slice-check", "slice-check", "Fourier slice identity");
  leaf(&app, "adjoint-check", "adjoint-check", "duality of R and R*");
  leaf(&app, "invert3d-check", "invert3d-check", "odd-dimension inversion on a 3-D grid");
  leaf(&app, "extend-homog", "extend-homog", "homogeneous extension across the origin");
  leaf(&app, "projective-check", "projective-check", "projective reduction of Radon data");
  CLI::App* ce = app.add_subcommand("counterexample", "invisible densities and the non-convergence example");
  ce->require_subcommand(1);
  leaf(ce, "invisible", "counterexample invisible", "hyperplane integrals of invisible densities");
  leaf(ce, "halfspace3d", "counterexample halfspace3d", "halfspace-invisible singular measure in R^3");
  leaf(ce, "proposition", "counterexample proposition", "scaled functionals of the oscillating density");
  CLI::App* rv = app.add_subcommand("regvar", "regular variation toolkit");
  rv->require_subcommand(1);
  leaf(rv, "estimate", "regvar estimate", "tail index and convergence-condition report");
  leaf(rv, "spectral", "regvar spectral", "spectral measure round trip");
  leaf(rv, "kesten", "regvar kesten", "Kesten recursion and Hill estimator");
  leaf(rv, "stable", "regvar stable", "stable-sum domain of attraction");
  CLI::App* wc = app.add_subcommand("weakconv", "weak convergence harness");
  wc->require_subcommand(1);
  leaf(wc, "table", "weakconv table", "limit tables of halfspace and test-function values");
  leaf(wc, "norms", "weakconv norms", "norm continuity check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return fail_config(e.what());
  }

  try {
    ExperimentConfig cfg;
    CLI::App* chosen = nullptr;
    for (const auto& [sub, path] : leaves)
      if (sub->parsed()) chosen = sub;
    if (run->parsed()) {
      if (flags.config.empty()) return fail_config("run needs --config");
      cfg = ExperimentConfig::from_json(read_config_file(flags.config));
    } else if (chosen) {
      const std::string& path = leaves[chosen];
      if (!flags.config.empty()) {
        cfg = ExperimentConfig::from_json(read_config_file(flags.config));
        if (cfg.experiment != path) return fail_config("config is for '" + cfg.experiment + "', not '" + path + "'");
      }
      cfg.experiment = path;
      const Json extra = extras_to_params(chosen->remaining());
      for (const auto& [k, v] : extra.items()) cfg.params[k] = v;
    } else {
      std::cout << app.help();
      return fail_config("no experiment selected");
    }
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.out) cfg.out = *flags.out;
    if (flags.plot) cfg.plot = true;
    if (flags.threads) cfg.threads = *flags.threads;
    if (flags.tolerance_scale) cfg.tolerance_scale = *flags.tolerance_scale;

    const auto result = exradon::cli::run_experiment(cfg);
    if (result.exit_code == 2 || result.report.contains("error")) std::cout << result.report.dump() << '\n';
    std::cout << result.verdict << '\n';
    return result.exit_code;
  } catch (const exradon::Error& e) {
    return fail_config(e.what());
  }
}
