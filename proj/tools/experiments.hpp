#pragma once

#include "exradon/io.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace exradon::cli {

/// One experiment run. `params` holds the experiment-specific settings; each
/// experiment rejects keys it does not know.
struct ExperimentConfig {
  std::string experiment;  // command path, e.g. "slice-check" or "regvar kesten"
  Json params = Json::object();
  QuadratureSettings quadrature{};
  std::uint64_t seed = 1;
  std::string out = "exradon-out";
  int threads = 1;
  double tolerance_scale = 1.0;
  bool plot = false;

  Json to_json() const;
  /// Throws ConfigError on unknown fields, wrong types or an unknown experiment.
  static ExperimentConfig from_json(const Json& j);
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

/// Every command path accepted by run_experiment.
const std::vector<std::string>& experiment_names();

/// A single contract: value compared against a bound.
struct Check {
  std::string name;
  double value;
  double bound;
  enum class Op { less, greater, is_true } op;
  bool passed;
};

struct RunResult {
  int exit_code = 0;           // 0 pass, 1 contract failure, 2 config error
  std::string verdict;         // one line, "PASS ..." or "FAIL ..."
  Json report;                 // report.json contents (without "schema")
  std::vector<Check> checks;
  std::filesystem::path directory;
  std::vector<std::filesystem::path> artifacts;
  double seconds = 0.0;        // wall time, never written to artifacts
};

/// Runs the experiment, writing artifacts under out/<experiment with dashes>.
/// Never throws: configuration problems give exit 2 and an error report.
RunResult run_experiment(const ExperimentConfig& cfg);

/// {"error": {"code": ..., "message": ...}, "schema": 1}.
Json error_json(const std::string& code, const std::string& message);

}  // namespace exradon::cli
