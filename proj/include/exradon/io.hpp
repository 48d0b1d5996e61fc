#pragma once

#include "exradon/model.hpp"
#include "exradon/radon.hpp"

#include <json.hpp>

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

namespace exradon {

// nlohmann::json keeps object keys in a std::map, so dumps are key-sorted.
using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Measures as {"kind": "grid" | "atomic" | "polar" | "analytic", ...}.
/// Grids are row-major with explicit shape, origin and spacing.
Json to_json(const MeasureModel& m);
/// Throws ConfigError on malformed documents or unknown fields.
MeasureModel measure_from_json(const Json& j);

Json to_json(const BumpFunction& b);
BumpFunction bump_from_json(const Json& j);

/// Throws ConfigError unless every key of the object j is listed in allowed.
void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where);

/// Shortest form "%.17g" of a double; non-finite values print as inf/-inf/nan.
std::string format_double(double x);

/// Small CSV table: either all cells numeric or pre-formatted strings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(const std::vector<double>& row);
  void add_row(const std::vector<std::string>& row);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes text to a file, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);
/// Dumps with indent 2 after stamping "schema".
void write_json(const std::filesystem::path& path, Json j);

/// Line plot written as standalone SVG. Every series is repeated in an XML
/// comment (one "x y" pair per line) so diffs show the data.
struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};
struct SvgPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<SvgSeries> series;
  std::vector<double> h_lines;  // horizontal reference lines

  std::string str() const;
};

/// Columns omega_index, omega_0 .. omega_{d-1}, p, value.
CsvTable sinogram_csv(const Sinogram& s);
/// Sampling metadata for the CSV sidecar.
Json sinogram_metadata(const Sinogram& s);

}  // namespace exradon
