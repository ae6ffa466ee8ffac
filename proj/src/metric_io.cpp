#include "curvlab/metric_io.hpp"

#include <cmath>
#include <fstream>

#include "curvlab/error.hpp"
#include "curvlab/tensor.hpp"

namespace curvlab {

namespace {

using nlohmann::json;

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(std::string("metric file: missing field \"") + key + "\"");
  return *it;
}

template <typename T>
T as(const json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw Error("metric file: field \"" + what + "\" has the wrong type");
  }
}

constexpr std::size_t kValidationPoints = 8;
constexpr double kSymmetrySlack = 1e-12;

// Lower-triangle entries are mirrored, so they must agree with the upper ones.
void check_lower_triangle(const MetricSpec& spec, const std::vector<std::string>& components,
                          const std::vector<std::string>& param_names) {
  const int n = spec.dim();
  const auto points = sample_points(spec, kValidationPoints, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      const auto& text = components[static_cast<std::size_t>(i * n + j)];
      if (text.empty() || text == spec.component_text(j, i)) continue;
      const Expr lower = Expr::parse(text, spec.coordinates(), param_names);
      for (const auto& p : points) {
        const double a = eval(lower, p, spec.parameters());
        const double b = eval(spec.component(j, i), p, spec.parameters());
        if (!(std::abs(a - b) <= kSymmetrySlack)) {
          throw Error("metric file: components (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                      ") and (" + std::to_string(j + 1) + "," + std::to_string(i + 1) + ") differ");
        }
      }
    }
}

void check_positive_definite(const MetricSpec& spec) {
  const int n = spec.dim();
  for (const auto& p : sample_points(spec, kValidationPoints, 1)) {
    Tensor g(n, 2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g({i, j}) = eval(spec.component(i, j), p, spec.parameters());
    MetricAtPoint::from_components(g);
  }
}

}  // namespace

MetricSpec metric_from_json(const json& j) {
  if (!j.is_object()) throw Error("metric file: top level must be an object");
  const auto name = as<std::string>(field(j, "name"), "name");
  const auto coords = as<std::vector<std::string>>(field(j, "coordinates"), "coordinates");
  const int n = static_cast<int>(coords.size());
  if (j.contains("dim") && as<int>(j.at("dim"), "dim") != n) {
    throw Error("metric file: dim does not match the number of coordinates");
  }

  ParamValues params;
  if (j.contains("parameters")) {
    const json& ps = j.at("parameters");
    if (!ps.is_object()) throw Error("metric file: field \"parameters\" must be an object");
    for (const auto& [k, v] : ps.items()) params[k] = as<double>(v, "parameters." + k);
  }

  const auto rows = as<std::vector<std::vector<std::string>>>(field(j, "components"), "components");
  if (rows.size() != static_cast<std::size_t>(n)) throw Error("metric file: components must have dim rows");
  std::vector<std::string> flat;
  for (const auto& row : rows) {
    if (row.size() != static_cast<std::size_t>(n)) throw Error("metric file: components must have dim columns");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  std::vector<std::string> upper = flat;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < i; ++k) upper[static_cast<std::size_t>(i * n + k)] = flat[static_cast<std::size_t>(k * n + i)];

  std::vector<Interval> box;
  for (const auto& iv : as<std::vector<std::vector<double>>>(field(j, "sampling_box"), "sampling_box")) {
    if (iv.size() != 2) throw Error("metric file: sampling_box entries must be [lo, hi]");
    box.emplace_back(iv[0], iv[1]);
  }

  std::optional<MetricOracle> oracle;
  if (j.contains("oracle") && !j.at("oracle").is_null()) {
    const json& o = j.at("oracle");
    MetricOracle m;
    if (o.contains("scalar_curvature")) m.scalar_curvature = as<double>(o.at("scalar_curvature"), "oracle.scalar_curvature");
    if (o.contains("einstein")) m.einstein = as<bool>(o.at("einstein"), "oracle.einstein");
    if (o.contains("conformally_flat")) m.conformally_flat = as<bool>(o.at("conformally_flat"), "oracle.conformally_flat");
    if (o.contains("weyl_norm2")) m.weyl_norm2 = as<double>(o.at("weyl_norm2"), "oracle.weyl_norm2");
    if (o.contains("traceless_ricci_norm2")) {
      m.traceless_ricci_norm2 = as<double>(o.at("traceless_ricci_norm2"), "oracle.traceless_ricci_norm2");
    }
    oracle = m;
  }

  MetricSpec spec = MetricSpec::create(name, coords, params, upper, box, oracle);
  std::vector<std::string> param_names;
  for (const auto& [k, v] : params) param_names.push_back(k);
  check_lower_triangle(spec, flat, param_names);
  check_positive_definite(spec);
  return spec;
}

json metric_to_json(const MetricSpec& spec) {
  const int n = spec.dim();
  json j;
  j["name"] = spec.name();
  j["dim"] = n;
  j["coordinates"] = spec.coordinates();
  j["parameters"] = json::object();
  for (const auto& [k, v] : spec.parameters()) j["parameters"][k] = v;
  json rows = json::array();
  for (int i = 0; i < n; ++i) {
    json row = json::array();
    for (int k = 0; k < n; ++k) row.push_back(spec.component_text(std::min(i, k), std::max(i, k)));
    rows.push_back(row);
  }
  j["components"] = rows;
  json box = json::array();
  for (const auto& [lo, hi] : spec.sampling_box()) box.push_back({lo, hi});
  j["sampling_box"] = box;
  if (spec.oracle()) {
    const MetricOracle& o = *spec.oracle();
    json oj = json::object();
    if (o.scalar_curvature) oj["scalar_curvature"] = *o.scalar_curvature;
    if (o.einstein) oj["einstein"] = *o.einstein;
    if (o.conformally_flat) oj["conformally_flat"] = *o.conformally_flat;
    if (o.weyl_norm2) oj["weyl_norm2"] = *o.weyl_norm2;
    if (o.traceless_ricci_norm2) oj["traceless_ricci_norm2"] = *o.traceless_ricci_norm2;
    j["oracle"] = oj;
  }
  return j;
}

MetricSpec load_metric(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open metric file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error("metric file " + path + " is not valid JSON: " + e.what());
  }
  return metric_from_json(j);
}

void save_metric(const MetricSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << metric_to_json(spec).dump(2) << '\n';
  if (!out) throw Error("error writing " + path);
}

}  // namespace curvlab
