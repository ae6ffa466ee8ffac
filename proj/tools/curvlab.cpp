// curvlab command-line tool. See `curvlab --help`.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "curvlab/cli.hpp"
#include "curvlab/error.hpp"

namespace {

// "zoo:NAME" selects a zoo member, anything else is a metric file path.
void set_metric(curvlab::RunConfig& c, const std::string& text) {
  const std::string prefix = "zoo:";
  if (text.rfind(prefix, 0) == 0) {
    c.metric.zoo = text.substr(prefix.size());
  } else {
    c.metric.path = text;
  }
}

// Each --param holds one or more comma separated key=value pairs.
void add_params(curvlab::RunConfig& c, const std::vector<std::string>& items) {
  for (const auto& item : items) {
    std::size_t start = 0;
    while (start <= item.size()) {
      const std::size_t end = std::min(item.find(',', start), item.size());
      const std::string pair = item.substr(start, end - start);
      const std::size_t eq = pair.find('=');
      if (eq == std::string::npos || eq == 0) throw curvlab::Error("--param expects key=value, got \"" + pair + "\"");
      c.metric.params[pair.substr(0, eq)] = pair.substr(eq + 1);
      start = end + 1;
    }
  }
}

void add_tolerances(curvlab::RunConfig& c, const std::vector<std::string>& items) {
  for (const auto& item : items) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) throw curvlab::Error("--tol expects name=value, got \"" + item + "\"");
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw curvlab::Error("--tol value is not a number: \"" + item + "\"");
    }
    c.tolerances.set(item.substr(0, eq), v);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvlab: curvature identities, pinching conditions and quadrature on model metrics"};
  app.set_version_flag("--version", std::string("curvlab ") + curvlab::kVersion);
  app.require_subcommand(1);

  curvlab::RunConfig config;
  std::string metric;
  std::vector<std::string> params;
  std::vector<std::string> tols;
  std::string format = "json";

  auto add_metric = [&](CLI::App* sub) {
    sub->add_option("--metric", metric, "zoo:NAME or path to a metric JSON file");
    sub->add_option("--param", params, "zoo parameter(s), key=value[,key=value...]");
  };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "markdown"}));
    sub->add_option("--output", config.output, "report path (default: standard output)");
  };

  CLI::App* check = app.add_subcommand("check", "run identity, inequality and pinching checks");
  add_metric(check);
  check->add_option("--check", config.checks, "check name (repeatable)");
  check->add_flag("--all", config.all, "run every check");
  check->add_option("--seed", config.seed, "sampling seed");
  check->add_option("--samples", config.samples, "number of sample points");
  check->add_option("--tol", tols, "tolerance override name=value (repeatable)");
  check->add_option("--resolution", config.resolution, "quadrature nodes per angle for thm12");
  check->add_option("--u", config.u_list, "test function for the Sobolev bound (repeatable)");
  add_output(check);

  CLI::App* consts = app.add_subcommand("constants", "tabulate the dimension constants");
  consts->add_option("--n", config.dims, "dimension (repeatable; default 4..8)");
  add_output(consts);

  CLI::App* integ = app.add_subcommand("integrate", "integrate curvature fields over a compact model");
  add_metric(integ);
  integ->add_option("--field", config.fields, "field name (repeatable; default one)");
  integ->add_option("--lp", config.lp, "report L^p norms instead of integrals");
  integ->add_option("--resolution", config.resolution, "nodes per angle");
  add_output(integ);

  CLI::App* sob = app.add_subcommand("sobolev", "Sobolev quotients of test functions");
  add_metric(sob);
  sob->add_option("--u", config.u_list, "test function in the angular coordinates (repeatable)");
  sob->add_option("--resolution", config.resolution, "nodes per angle");
  add_output(sob);

  CLI::App* exp = app.add_subcommand("export-zoo", "write zoo members as metric JSON files");
  exp->add_option("--output", config.output, "output directory")->required();
  exp->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "markdown"}));

  CLI11_PARSE(app, argc, argv);

  try {
    config.command = app.get_subcommands().front()->get_name();
    if (!metric.empty()) set_metric(config, metric);
    add_params(config, params);
    add_tolerances(config, tols);
    config.format = format == "markdown" ? curvlab::ReportFormat::markdown : curvlab::ReportFormat::json;
  } catch (const curvlab::Error& e) {
    std::cerr << "curvlab: " << e.what() << '\n';
    return 2;
  }
  return curvlab::run(config);
}
