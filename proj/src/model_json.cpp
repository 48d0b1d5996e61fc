#include "exradon/io.hpp"

#include <algorithm>
#include <cstring>

namespace exradon {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) config_error(where + ": missing field '" + key + "'");
  return j.at(key);
}

double number(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_number()) config_error(where + ": field '" + std::string(key) + "' must be a number");
  return v.get<double>();
}

int integer(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_number_integer()) config_error(where + ": field '" + std::string(key) + "' must be an integer");
  return v.get<int>();
}

Json vec_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector vec_from(const Json& j, const std::string& where) {
  if (!j.is_array()) config_error(where + ": expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) config_error(where + ": expected an array of numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Json columns_json(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(vec_json(m.col(c)));
  return a;
}

Matrix columns_from(const Json& j, int d, const std::string& where) {
  if (!j.is_array()) config_error(where + ": expected an array of points");
  Matrix m(d, static_cast<Eigen::Index>(j.size()));
  for (std::size_t c = 0; c < j.size(); ++c) {
    const Vector v = vec_from(j[c], where);
    if (v.size() != d) config_error(where + ": point dimension does not match dim");
    m.col(static_cast<Eigen::Index>(c)) = v;
  }
  return m;
}

const char* angular_kind_name(AngularDensity::Kind k) {
  switch (k) {
    case AngularDensity::Kind::constant: return "constant";
    case AngularDensity::Kind::harmonic: return "harmonic";
    case AngularDensity::Kind::zonal: return "zonal";
  }
  return "constant";
}

Json angular_json(const AngularPart& u) {
  if (const auto* s = std::get_if<SpectralMeasure>(&u)) {
    return Json{{"type", "spectral"}, {"atoms", columns_json(s->atoms)}, {"weights", vec_json(s->weights)}};
  }
  const auto& a = std::get<AngularDensity>(u);
  return Json{{"type", "density"}, {"kind", angular_kind_name(a.kind)}, {"dim", a.dim}, {"order", a.order},
              {"c0", a.c0}, {"a", a.a}, {"b", a.b}};
}

AngularPart angular_from(const Json& j, int d) {
  const std::string where = "measure.angular";
  const std::string type = field(j, "type", where).get<std::string>();
  if (type == "spectral") {
    reject_unknown_keys(j, {"type", "atoms", "weights"}, where);
    Matrix atoms = columns_from(field(j, "atoms", where), d, where);
    Vector w = vec_from(field(j, "weights", where), where);
    if (w.size() != atoms.cols()) config_error(where + ": atoms and weights differ in length");
    return SpectralMeasure(std::move(atoms), std::move(w));
  }
  if (type != "density") config_error(where + ": type must be 'spectral' or 'density'");
  reject_unknown_keys(j, {"type", "kind", "dim", "order", "c0", "a", "b"}, where);
  AngularDensity a;
  const std::string kind = field(j, "kind", where).get<std::string>();
  if (kind == "constant") {
    a.kind = AngularDensity::Kind::constant;
  } else if (kind == "harmonic") {
    a.kind = AngularDensity::Kind::harmonic;
  } else if (kind == "zonal") {
    a.kind = AngularDensity::Kind::zonal;
  } else {
    config_error(where + ": unknown angular kind '" + kind + "'");
  }
  a.dim = j.contains("dim") ? integer(j, "dim", where) : d;
  a.order = j.contains("order") ? integer(j, "order", where) : 0;
  a.c0 = j.contains("c0") ? number(j, "c0", where) : 1.0;
  a.a = j.contains("a") ? number(j, "a", where) : 0.0;
  a.b = j.contains("b") ? number(j, "b", where) : 0.0;
  if (a.dim != d) config_error(where + ": dim does not match the measure");
  return a;
}

Json analytic_json(const AnalyticDensity& f) {
  Json j{{"kind", "analytic"}, {"formula", to_string(f.formula)}, {"dim", f.dim}, {"params", f.params}};
  if (!f.multi_index.empty()) j["multi_index"] = f.multi_index;
  if (f.base) j["base"] = analytic_json(*f.base);
  return j;
}

AnalyticDensity analytic_from(const Json& j, const std::string& where) {
  reject_unknown_keys(j, {"kind", "formula", "dim", "params", "multi_index", "base"}, where);
  AnalyticDensity f;
  try {
    f.formula = formula_from_string(field(j, "formula", where).get<std::string>());
  } catch (const Error& e) {
    config_error(where + ": " + e.what());
  }
  f.dim = integer(j, "dim", where);
  if (j.contains("params")) {
    const Vector p = vec_from(j.at("params"), where + ".params");
    f.params.assign(p.data(), p.data() + p.size());
  }
  if (j.contains("multi_index")) {
    for (const auto& v : j.at("multi_index")) {
      if (!v.is_number_integer()) config_error(where + ".multi_index: expected integers");
      f.multi_index.push_back(v.get<int>());
    }
  }
  if (j.contains("base")) f.base = std::make_shared<const AnalyticDensity>(analytic_from(j.at("base"), where + ".base"));
  return f;
}

}  // namespace

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) config_error(where + ": expected an object");
  for (const auto& item : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return item.key() == a; });
    if (!known) config_error(where + ": unknown field '" + item.key() + "'");
  }
}

Json to_json(const MeasureModel& m) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, GridDensity>) {
          return Json{{"kind", "grid"},
                      {"dim", x.dim()},
                      {"shape", x.shape()},
                      {"origin", vec_json(x.origin())},
                      {"spacing", x.spacing()},
                      {"samples", x.samples()}};
        } else if constexpr (std::is_same_v<T, AtomicMeasure>) {
          return Json{{"kind", "atomic"}, {"dim", x.dim()}, {"points", columns_json(x.points)},
                      {"weights", vec_json(x.weights)}};
        } else if constexpr (std::is_same_v<T, PolarHomogeneous>) {
          return Json{{"kind", "polar"}, {"dim", x.dim}, {"degree", x.degree}, {"inner_cutoff", x.inner_cutoff},
                      {"angular", angular_json(x.angular)}};
        } else {
          return analytic_json(x);
        }
      },
      m);
}

MeasureModel measure_from_json(const Json& j) {
  const std::string where = "measure";
  if (!j.is_object()) config_error(where + ": expected an object");
  const Json& kind_field = field(j, "kind", where);
  if (!kind_field.is_string()) config_error(where + ": kind must be a string");
  const std::string kind = kind_field.get<std::string>();
  try {
    if (kind == "grid") {
      reject_unknown_keys(j, {"kind", "dim", "shape", "origin", "spacing", "samples"}, where);
      const int d = integer(j, "dim", where);
      std::vector<int> shape;
      for (const auto& v : field(j, "shape", where)) shape.push_back(v.get<int>());
      const Vector origin = vec_from(field(j, "origin", where), where + ".origin");
      const Vector samples = vec_from(field(j, "samples", where), where + ".samples");
      return GridDensity(d, std::move(shape), origin, number(j, "spacing", where),
                         std::vector<double>(samples.data(), samples.data() + samples.size()));
    }
    if (kind == "atomic") {
      reject_unknown_keys(j, {"kind", "dim", "points", "weights"}, where);
      const int d = integer(j, "dim", where);
      Matrix pts = columns_from(field(j, "points", where), d, where + ".points");
      Vector w = vec_from(field(j, "weights", where), where + ".weights");
      return AtomicMeasure(std::move(pts), std::move(w));
    }
    if (kind == "polar") {
      reject_unknown_keys(j, {"kind", "dim", "degree", "inner_cutoff", "angular"}, where);
      PolarHomogeneous p;
      p.dim = integer(j, "dim", where);
      p.degree = number(j, "degree", where);
      p.inner_cutoff = j.contains("inner_cutoff") ? number(j, "inner_cutoff", where) : 0.0;
      p.angular = angular_from(field(j, "angular", where), p.dim);
      return p;
    }
    if (kind == "analytic") return analytic_from(j, where);
  } catch (const nlohmann::json::exception& e) {
    config_error(where + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    config_error(where + ": " + e.what());
  }
  config_error(where + ": unknown kind '" + kind + "'");
}

Json to_json(const BumpFunction& b) {
  return Json{{"center", vec_json(b.center())}, {"radius", b.radius()}, {"amplitude", b.amplitude()},
              {"shell_radius", b.shell_radius()}};
}

BumpFunction bump_from_json(const Json& j) {
  const std::string where = "bump";
  reject_unknown_keys(j, {"center", "radius", "amplitude", "shell_radius"}, where);
  try {
    return BumpFunction(vec_from(field(j, "center", where), where + ".center"), number(j, "radius", where),
                        j.contains("amplitude") ? number(j, "amplitude", where) : 1.0,
                        j.contains("shell_radius") ? number(j, "shell_radius", where) : 0.0);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    config_error(where + ": " + e.what());
  }
}

}  // namespace exradon
