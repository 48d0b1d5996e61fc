#include <doctest.h>

#include "experiments.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace exradon;
using namespace exradon::cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("exradon-test-" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig quick_slice(const std::filesystem::path& out) {
  ExperimentConfig c;
  c.experiment = "slice-check";
  c.params = Json{{"measure", "atomic"}};
  c.out = out.string();
  return c;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("every command path is registered") {
  const auto& names = experiment_names();
  CHECK(names.size() == 15);
  for (const char* n : {"adjoint-check", "slice-check", "invert3d-check", "extend-homog", "projective-check", "radon",
                        "counterexample invisible", "counterexample halfspace3d", "counterexample proposition",
                        "regvar estimate", "regvar spectral", "regvar kesten", "regvar stable", "weakconv table",
                        "weakconv norms"})
    CHECK(std::find(names.begin(), names.end(), std::string(n)) != names.end());
}

TEST_CASE("configs round-trip through JSON") {
  ExperimentConfig c;
  c.experiment = "regvar kesten";
  c.params = Json{{"n", 1000}, {"p_high", 0.25}};
  c.seed = 99;
  c.quadrature.angular_nodes = 64;
  c.tolerance_scale = 2.0;
  c.plot = true;
  const ExperimentConfig back = ExperimentConfig::from_json(Json::parse(c.to_json().dump()));
  CHECK(back == c);
}

TEST_CASE("malformed configs are configuration errors") {
  auto code_of = [](const Json& j) {
    try {
      ExperimentConfig::from_json(j);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::NonFinite;
  };
  CHECK(code_of(Json::object()) == ErrorCode::ConfigError);
  CHECK(code_of(Json{{"experiment", "nope"}}) == ErrorCode::ConfigError);
  CHECK(code_of(Json{{"experiment", "slice-check"}, {"colour", 1}}) == ErrorCode::ConfigError);
  CHECK(code_of(Json{{"experiment", "slice-check"}, {"seed", -3}}) == ErrorCode::ConfigError);
  CHECK(code_of(Json{{"experiment", "slice-check"}, {"quadrature", {{"order", 0}}}}) == ErrorCode::ConfigError);
}

TEST_CASE("unknown params give exit code 2 and an error report") {
  auto c = quick_slice(scratch("unknown"));
  c.params["bogus"] = 1;
  const RunResult r = run_experiment(c);
  CHECK(r.exit_code == 2);
  CHECK(r.report.contains("error"));
  CHECK(r.report["schema"] == 1);
}

TEST_CASE("a passing run writes a report with its checks") {
  const auto dir = scratch("pass");
  const RunResult r = run_experiment(quick_slice(dir));
  CHECK(r.exit_code == 0);
  CHECK(r.verdict.rfind("PASS slice-check:", 0) == 0);
  CHECK(r.directory == dir / "slice-check");
  const Json rep = Json::parse(slurp(r.directory / "report.json"));
  CHECK(rep["schema"] == 1);
  CHECK(rep["verdict"] == "PASS");
  CHECK_FALSE(rep["config"].contains("out"));
  bool has_svg = false;
  for (const auto& a : r.artifacts) has_svg |= a.extension() == ".svg";
  CHECK_FALSE(has_svg);
}

TEST_CASE("tightened tolerances turn a pass into a contract failure") {
  auto c = quick_slice(scratch("strict"));
  c.tolerance_scale = 1e-12;
  const RunResult r = run_experiment(c);
  CHECK(r.exit_code == 1);
  CHECK(r.verdict.rfind("FAIL", 0) == 0);
}

TEST_CASE("reruns and output directories do not change artifact bytes") {
  const RunResult a = run_experiment(quick_slice(scratch("det-a")));
  const RunResult b = run_experiment(quick_slice(scratch("det-b")));
  REQUIRE(a.artifacts.size() == b.artifacts.size());
  REQUIRE_FALSE(a.artifacts.empty());
  for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
    CHECK(a.artifacts[i].filename() == b.artifacts[i].filename());
    CHECK(slurp(a.artifacts[i]) == slurp(b.artifacts[i]));
  }
}

TEST_CASE("numbers are written with round-trip precision") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 1e-9 + 1e-25}) CHECK(std::stod(format_double(x)) == x);
  CsvTable t({"a", "b"});
  t.add_row(std::vector<double>{0.1, 2.0});
  CHECK(t.str() == "a,b\n0.10000000000000001,2\n");
}

TEST_CASE("plots embed their data") {
  SvgPlot p;
  p.title = "t";
  p.x_label = "x";
  p.y_label = "y";
  p.series.push_back(SvgSeries{"s--1", {1.0, 2.0}, {3.0, 4.0}});
  const std::string svg = p.str();
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("1 3") != std::string::npos);
  // comments may not contain a double dash
  const auto open = svg.find("<!--");
  const auto close = svg.find("-->", open);
  CHECK(svg.substr(open + 4, close - open - 4).find("--") == std::string::npos);
}

TEST_CASE("the binary maps configuration problems to exit code 2") {
  const std::string exe = EXRADON_CLI_PATH;
  const auto out = scratch("bin");
  CHECK(run_shell(exe + " run --config " EXRADON_TEST_DATA "/empty.json > /dev/null") == 2);
  CHECK(run_shell(exe + " slice-check --bogus 3 --out " + out.string() + " > /dev/null") == 2);
  CHECK(run_shell(exe + " slice-check --measure atomic --out " + out.string() + " > /dev/null") == 0);
  CHECK(std::filesystem::exists(out / "slice-check" / "report.json"));
  CHECK(run_shell("EXRADON_OUT=" + out.string() + "/env " + exe + " slice-check --measure atomic --plot > /dev/null") == 0);
  CHECK(std::filesystem::exists(out / "env" / "slice-check" / "report.json"));
  bool svg = false;
  for (const auto& e : std::filesystem::directory_iterator(out / "env" / "slice-check")) svg |= e.path().extension() == ".svg";
  CHECK(svg);
}

}  // TEST_SUITE
