#pragma once

// Command-line front end: configuration, execution and report output.
//
// Exit status: 0 when every applicable check passes, 1 when a check fails,
// 2 on configuration, input or I/O errors. Inapplicable checks and
// informational predicates never fail a run.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvlab/checks.hpp"
#include "curvlab/metric.hpp"

namespace curvlab {

inline constexpr const char* kVersion = "0.1.0";

enum class ReportFormat { json, markdown };

struct MetricSource {
  /// Zoo member name; empty when `path` is used.
  std::string zoo;
  ZooParams params;
  std::string path;
};

struct RunConfig {
  /// check | constants | integrate | sobolev | export-zoo
  std::string command = "check";
  MetricSource metric;
  /// Check names; empty with `all` set selects every check.
  std::vector<std::string> checks;
  bool all = false;
  std::uint64_t seed = 1;
  std::size_t samples = 20;
  Tolerances tolerances;
  /// Quadrature nodes per angle; 0 selects the model default.
  int resolution = 0;
  /// Test functions for Sobolev quotients and the integral pinching check.
  std::vector<std::string> u_list;
  /// Fields for `integrate`.
  std::vector<std::string> fields;
  /// When set, `integrate` reports L^p norms instead of integrals.
  double lp = 0.0;
  /// Dimensions for `constants`.
  std::vector<int> dims;
  ReportFormat format = ReportFormat::json;
  /// Empty writes to standard output. For export-zoo this is a directory.
  std::string output;
};

/// Names accepted by --check, in execution order.
const std::vector<std::string>& check_names();
/// Names accepted by --field.
const std::vector<std::string>& field_names();
/// Zoo members written by export-zoo.
std::vector<MetricSpec> export_zoo_members();

/// Throws Error for unknown commands, checks, fields or formats. Runs before
/// any computation.
void validate(const RunConfig& config);

MetricSpec resolve_metric(const MetricSource& source);

struct RunResult {
  nlohmann::json report;
  int exit_status = 0;
};

/// Builds the report without writing it. Throws Error on invalid input.
RunResult execute(const RunConfig& config);

/// Validates, executes and writes the report. Returns the exit status;
/// errors are printed to stderr.
int run(const RunConfig& config);

}  // namespace curvlab
