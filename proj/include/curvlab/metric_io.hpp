#pragma once

// Metric definition files (JSON):
//
//   {
//     "name": "...", "dim": n,
//     "coordinates": ["x1", ...],
//     "parameters": {"r": 1.0},
//     "components": [["g11", "g12", ...], ...],   n x n, upper triangle authoritative
//     "sampling_box": [[lo, hi], ...],
//     "oracle": {"scalar_curvature": .., "einstein": .., "conformally_flat": ..,
//                "weyl_norm2": .., "traceless_ricci_norm2": ..}        optional
//   }
//
// A non-empty lower-triangle entry must evaluate to its mirror within 1e-12
// at the validation points.

#include <string>

#include <json.hpp>

#include "curvlab/metric.hpp"

namespace curvlab {

/// Throws Error naming the offending field.
MetricSpec metric_from_json(const nlohmann::json& j);
nlohmann::json metric_to_json(const MetricSpec& spec);

/// Throws Error when the file cannot be read or is malformed.
MetricSpec load_metric(const std::string& path);
void save_metric(const MetricSpec& spec, const std::string& path);

}  // namespace curvlab
