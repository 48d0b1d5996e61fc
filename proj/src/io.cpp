#include "exradon/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace exradon {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void CsvTable::add_row(const std::vector<double>& row) {
  std::vector<std::string> cells;
  cells.reserve(row.size());
  for (double v : row) cells.push_back(format_double(v));
  add_row(cells);
}

void CsvTable::add_row(const std::vector<std::string>& row) {
  require(row.size() == header_.size(), ErrorCode::BadParams, "CSV row width does not match the header");
  rows_.push_back(row);
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorCode::ConfigError, "cannot open " + path.string() + " for writing");
  f << text;
  require(static_cast<bool>(f), ErrorCode::ConfigError, "failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, Json j) {
  j["schema"] = kSchemaVersion;
  write_text(path, j.dump(2) + "\n");
}

namespace {

std::string short_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// "--" may not appear inside an XML comment.
std::string comment_safe(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '-' && !out.empty() && out.back() == '-') out += ' ';
    out += c;
  }
  return out;
}

}  // namespace

std::string SvgPlot::str() const {
  constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(tx(x)) && std::isfinite(ty(y)) && (!log_x || x > 0) && (!log_y || y > 0);
  };

  double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  for (double h : h_lines) {
    if (!log_y || h > 0) {
      y0 = std::min(y0, ty(h));
      y1 = std::max(y1, ty(h));
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-300) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-300) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\">\n";
  for (const auto& s : series) {
    o << "<!-- series " << comment_safe(s.name) << "\n";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      o << format_double(s.x[i]) << ' ' << format_double(s.y[i]) << '\n';
    o << "-->\n";
  }
  o << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(title)
    << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
    const double xv = log_x ? std::pow(10.0, fx) : fx, yv = log_y ? std::pow(10.0, fy) : fy;
    o << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
      << short_num(xv) << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
      << short_num(yv) << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
    << escape_xml(x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
    << (T + H - B) / 2 << ")\">" << escape_xml(y_label) << "</text>\n";
  for (double h : h_lines) {
    if (log_y && h <= 0) continue;
    o << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << py(h) << "\" y2=\"" << py(h)
      << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = colors[k % 6];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      if (!first) o << ' ';
      o << short_num(px(s.x[i])) << ',' << short_num(py(s.y[i]));
      first = false;
    }
    o << "\"/>\n";
    o << "<text x=\"" << W - R - 6 << "\" y=\"" << T + 16 + 14 * k << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
      << color << "\">" << escape_xml(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

CsvTable sinogram_csv(const Sinogram& s) {
  const int d = static_cast<int>(s.directions.rows());
  std::vector<std::string> header{"omega_index"};
  for (int k = 0; k < d; ++k) header.push_back("omega_" + std::to_string(k));
  header.push_back("p");
  header.push_back("value");
  CsvTable t(header);
  for (Eigen::Index i = 0; i < s.directions.cols(); ++i) {
    for (std::size_t j = 0; j < s.offsets.size(); ++j) {
      std::vector<std::string> row{std::to_string(i)};
      for (int k = 0; k < d; ++k) row.push_back(format_double(s.directions(k, i)));
      row.push_back(format_double(s.offsets[j]));
      row.push_back(format_double(s.values(i, static_cast<Eigen::Index>(j))));
      t.add_row(row);
    }
  }
  return t;
}

Json sinogram_metadata(const Sinogram& s) {
  const auto& m = s.sampling;
  return Json{{"dim", m.dim}, {"n_omega", m.n_omega}, {"p_min", m.p_min}, {"p_max", m.p_max}, {"n_p", m.n_p},
              {"direction_set", m.dim == 2 ? "equiangular" : "fibonacci"}};
}

}  // namespace exradon
