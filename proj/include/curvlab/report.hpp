#pragma once

// Report documents. The JSON document is the single source of truth; the
// markdown rendering is produced from it.

#include <string>

#include <json.hpp>

#include "curvlab/checks.hpp"

namespace curvlab {

nlohmann::json check_to_json(const CheckReport& r);

/// Tables of the report's checks, constants, integrals and quotients.
std::string render_markdown(const nlohmann::json& report);

/// Report without its "timestamp" field; equal for equal runs.
nlohmann::json without_timestamp(nlohmann::json report);

}  // namespace curvlab
