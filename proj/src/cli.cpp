#include "curvlab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "curvlab/error.hpp"
#include "curvlab/metric_io.hpp"
#include "curvlab/quadrature.hpp"
#include "curvlab/report.hpp"

namespace curvlab {

using nlohmann::json;

namespace {

const std::vector<std::string> kCommands = {"check", "constants", "integrate", "sobolev", "export-zoo"};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::string timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  json m;
  if (!c.metric.path.empty()) {
    m["path"] = c.metric.path;
  } else if (!c.metric.zoo.empty()) {
    m["zoo"] = c.metric.zoo;
    m["params"] = json::object();
    for (const auto& [k, v] : c.metric.params) m["params"][k] = v;
  }
  j["metric"] = m;
  j["checks"] = c.checks;
  j["all"] = c.all;
  j["seed"] = c.seed;
  j["samples"] = c.samples;
  j["tolerances"] = json::object();
  for (const auto& [k, v] : c.tolerances.overrides()) j["tolerances"][k] = v;
  j["resolution"] = c.resolution;
  j["u"] = c.u_list;
  j["fields"] = c.fields;
  j["lp"] = c.lp;
  j["dims"] = c.dims;
  j["format"] = c.format == ReportFormat::json ? "json" : "markdown";
  j["output"] = c.output;
  return j;
}

bool has_metric(const MetricSource& s) { return !s.zoo.empty() || !s.path.empty(); }

// The angular integration chart of a compact model metric.
MetricSpec integration_chart(const MetricSpec& spec) {
  if (!spec.compact_model()) {
    throw Error("metric \"" + spec.name() + "\" is not a compact model (sphere or product of spheres)");
  }
  return angular_chart(*spec.compact_model());
}

CheckReport inapplicable_entry(const std::string& name, const std::string& metric, const std::string& why) {
  CheckReport r;
  r.name = name;
  r.metric = metric;
  r.applicable = false;
  r.ok = true;
  r.verdict = "inapplicable";
  r.note = why;
  return r;
}

CheckReport run_check(const std::string& name, const MetricSpec& spec, Bundles b, const RunConfig& c) {
  const std::string& m = spec.name();
  const Tolerances& tol = c.tolerances;
  if (name == "symmetry_catalog") return check_symmetry_catalog(m, b, tol);
  if (name == "oracle_curvature") return check_oracle(spec, b, tol);
  if (name == "kato") return check_kato(m, b, tol);
  if (name == "ricci_identity") return check_ricci_identity(m, b, tol);
  if (name == "contracted_bach") return check_contracted_bach(m, b, tol);
  if (name == "okumura") return check_okumura(m, b, {}, tol);
  if (name == "weyl_laplacian_einstein") return check_weyl_laplacian_einstein(m, b, tol);
  if (name == "pinch_thm11") return pinch_pointwise_thm11(m, b, tol);
  if (name == "pinch_einstein_pointwise") return pinch_einstein_pointwise(m, b, tol);
  if (name == "constants_ordering") return check_constants_ordering(tol);
  if (name == "thm12") {
    if (!spec.compact_model()) return inapplicable_entry(name, m, "needs a compact model (sphere or product of spheres)");
    const std::vector<std::string> u = c.u_list.empty() ? std::vector<std::string>{"1"} : c.u_list;
    CheckReport r = thm12_report(integration_chart(spec), u, c.resolution, tol);
    r.metric = m;
    return r;
  }
  if (name == "chart_independence") {
    if (!spec.compact_model()) return inapplicable_entry(name, m, "needs a compact model (sphere or product of spheres)");
    return check_chart_independence(*spec.compact_model(), c.samples, c.seed, tol);
  }
  throw Error("unknown check \"" + name + "\"");
}

ScalarField field_function(const std::string& name) {
  if (name == "one") return [](const CurvatureBundle&) { return 1.0; };
  if (name == "scalar") return [](const CurvatureBundle& b) { return b.scalar; };
  if (name == "riemann_norm2") return [](const CurvatureBundle& b) { return norm2(b.riemann, b.metric); };
  if (name == "weyl_norm") return [](const CurvatureBundle& b) { return norm(b.weyl, b.metric); };
  if (name == "weyl_norm2") return [](const CurvatureBundle& b) { return norm2(b.weyl, b.metric); };
  if (name == "traceless_ricci_norm") return [](const CurvatureBundle& b) { return norm(b.traceless_ricci, b.metric); };
  if (name == "traceless_ricci_norm2") {
    return [](const CurvatureBundle& b) { return norm2(b.traceless_ricci, b.metric); };
  }
  if (name == "pinching_norm") {
    return [](const CurvatureBundle& b) {
      return norm(pinching_tensor(b, constants(b.dim).lambda_integral), b.metric);
    };
  }
  throw Error("unknown field \"" + name + "\"");
}

json integral_json(const std::string& field, const std::string& kind, const Integral& i) {
  return json{{"field", field},           {"kind", kind},           {"value", i.value},
              {"half_value", i.half_value}, {"refinement", i.refinement}, {"nodes", i.nodes}};
}

int status_of(const json& checks) {
  for (const auto& c : checks)
    if (!c["ok"].get<bool>()) return 1;
  return 0;
}

std::string file_stem(const std::string& name) {
  std::string s;
  for (char ch : name) {
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-') {
      s += ch;
    } else if (!s.empty() && s.back() != '_') {
      s += '_';
    }
  }
  while (!s.empty() && s.back() == '_') s.pop_back();
  return s;
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {
      "symmetry_catalog", "oracle_curvature",         "kato",          "ricci_identity",
      "contracted_bach",  "okumura",                  "weyl_laplacian_einstein", "pinch_thm11",
      "pinch_einstein_pointwise", "constants_ordering", "thm12",        "chart_independence",
  };
  return names;
}

const std::vector<std::string>& field_names() {
  static const std::vector<std::string> names = {"one",       "scalar",     "riemann_norm2",
                                                 "weyl_norm", "weyl_norm2", "traceless_ricci_norm",
                                                 "traceless_ricci_norm2", "pinching_norm"};
  return names;
}

std::vector<MetricSpec> export_zoo_members() {
  return {euclidean(4),
          sphere(4, 1.0),
          sphere(5, 1.0),
          sphere(6, 1.0),
          hyperbolic(4),
          product_spheres(2, 1.0, 2, 1.0),
          product_spheres(2, 1.0, 2, 2.0),
          conformal(4, "0.1*x1^2 - 0.05*x2*x3"),
          perturbation(4, 42, 0.02)};
}

void validate(const RunConfig& c) {
  if (!contains(kCommands, c.command)) throw Error("unknown command \"" + c.command + "\"");
  for (const auto& name : c.checks)
    if (!contains(check_names(), name)) throw Error("unknown check \"" + name + "\"");
  for (const auto& name : c.fields)
    if (!contains(field_names(), name)) throw Error("unknown field \"" + name + "\"");
  if (!c.metric.zoo.empty() && !c.metric.path.empty()) throw Error("give either a zoo metric or a metric file, not both");
  if (c.resolution != 0 && c.resolution < 2) throw Error("resolution must be at least 2");
  if (c.lp != 0.0 && !(c.lp >= 1.0)) throw Error("--lp must be >= 1");
  for (int n : c.dims)
    if (n < 4 || n > 8) throw Error("constants are tabulated for 4 <= n <= 8");
  if (c.command == "check") {
    if (c.checks.empty() && !c.all) throw Error("select checks with --check or --all");
    if (!has_metric(c.metric) && !(c.checks.size() == 1 && c.checks[0] == "constants_ordering")) {
      throw Error("check needs --metric");
    }
    if (c.samples == 0) throw Error("--samples must be positive");
  }
  if ((c.command == "integrate" || c.command == "sobolev") && !has_metric(c.metric)) {
    throw Error(c.command + " needs --metric");
  }
  if (c.command == "export-zoo" && c.output.empty()) throw Error("export-zoo needs --output DIR");
}

MetricSpec resolve_metric(const MetricSource& source) {
  if (!source.path.empty()) return load_metric(source.path);
  return zoo(source.zoo, source.params);
}

RunResult execute(const RunConfig& c) {
  validate(c);
  json report;
  report["version"] = std::string("curvlab ") + kVersion;
  report["config"] = config_to_json(c);
  report["checks"] = json::array();
  RunResult result;

  if (c.command == "check") {
    std::vector<std::string> names = c.all ? check_names() : c.checks;
    std::vector<CurvatureBundle> bundles;
    std::optional<MetricSpec> spec;
    if (has_metric(c.metric)) {
      spec = resolve_metric(c.metric);
      bundles = sample_bundles(*spec, c.samples, c.seed, CurvatureLevel::full);
      report["metric"] = metric_to_json(*spec);
    }
    for (const auto& name : names) {
      CheckReport r;
      if (!spec) {
        r = check_constants_ordering(c.tolerances);
      } else {
        try {
          r = run_check(name, *spec, bundles, c);
        } catch (const Error& e) {
          r = inapplicable_entry(name, spec->name(), e.what());
        }
      }
      report["checks"].push_back(check_to_json(r));
    }
    result.exit_status = status_of(report["checks"]);
  } else if (c.command == "constants") {
    const std::vector<int> dims = c.dims.empty() ? std::vector<int>{4, 5, 6, 7, 8} : c.dims;
    report["constants"] = json::array();
    for (int n : dims) {
      const ConstantsTable t = constants(n);
      json row{{"n", n},
               {"C_n", t.c_n},
               {"pointwise_threshold", t.pointwise_threshold},
               {"integral_factor", integral_factor(n)},
               {"okumura_factor", t.okumura_factor},
               {"lambda_pointwise", t.lambda_pointwise},
               {"lambda_integral", t.lambda_integral}};
      if (t.e_n) row["E_n"] = *t.e_n;
      if (t.e5_coefficient) row["E5_coefficient"] = *t.e5_coefficient;
      report["constants"].push_back(row);
    }
    report["checks"].push_back(check_to_json(check_constants_ordering(c.tolerances)));
    result.exit_status = status_of(report["checks"]);
  } else if (c.command == "integrate") {
    const MetricSpec chart = integration_chart(resolve_metric(c.metric));
    const std::vector<std::string> names = c.fields.empty() ? std::vector<std::string>{"one"} : c.fields;
    const int res = c.resolution > 0 ? c.resolution : default_resolution(*chart.compact_model());
    const IntegrationGrid grid = make_grid(chart, res);
    report["chart"] = chart.name();
    report["resolution"] = res;
    report["integrals"] = json::array();
    for (const auto& name : names) {
      const ScalarField f = field_function(name);
      if (c.lp > 0.0) {
        report["integrals"].push_back(integral_json(name, "L^" + json(c.lp).dump() + " norm",
                                                    lp_norm(chart, f, c.lp, grid)));
      } else {
        report["integrals"].push_back(integral_json(name, "integral", integrate(chart, f, grid)));
      }
    }
  } else if (c.command == "sobolev") {
    const MetricSpec chart = integration_chart(resolve_metric(c.metric));
    const std::vector<std::string> us = c.u_list.empty() ? std::vector<std::string>{"1"} : c.u_list;
    report["chart"] = chart.name();
    report["coordinates"] = chart.coordinates();
    report["sobolev"] = json::array();
    for (const auto& u : us) {
      const SobolevQuotient q = sobolev_quotient(chart, u, c.resolution);
      report["sobolev"].push_back(json{{"u", u},
                                       {"quotient", q.quotient},
                                       {"half_quotient", q.half_quotient},
                                       {"refinement", q.refinement},
                                       {"numerator", q.numerator},
                                       {"denominator", q.denominator},
                                       {"nodes", q.nodes}});
    }
    report["note"] = "quotients are upper bounds for the Sobolev constant";
  } else if (c.command == "export-zoo") {
    std::filesystem::create_directories(c.output);
    report["files"] = json::array();
    for (const auto& m : export_zoo_members()) {
      const std::string path = (std::filesystem::path(c.output) / (file_stem(m.name()) + ".json")).string();
      save_metric(m, path);
      report["files"].push_back(path);
    }
  }
  report["status"] = result.exit_status == 0 ? "pass" : "fail";
  report["timestamp"] = timestamp();
  result.report = std::move(report);
  return result;
}

int run(const RunConfig& c) {
  RunResult result;
  try {
    result = execute(c);
  } catch (const std::exception& e) {
    std::cerr << "curvlab: " << e.what() << '\n';
    return 2;
  }
  const std::string text =
      c.format == ReportFormat::json ? result.report.dump(2) + "\n" : render_markdown(result.report);
  const bool to_file = !c.output.empty() && c.command != "export-zoo";
  if (to_file) {
    std::ofstream out(c.output);
    out << text;
    if (!out) {
      std::cerr << "curvlab: cannot write " << c.output << '\n';
      return 2;
    }
  } else {
    std::cout << text;
  }
  return result.exit_status;
}

}  // namespace curvlab
