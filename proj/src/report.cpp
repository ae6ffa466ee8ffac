#include "curvlab/report.hpp"

#include <cstdio>
#include <sstream>

namespace curvlab {

using nlohmann::json;

json check_to_json(const CheckReport& r) {
  json j;
  j["name"] = r.name;
  j["metric"] = r.metric;
  j["kind"] = to_string(r.kind);
  j["verdict"] = r.verdict;
  j["ok"] = r.ok;
  j["applicable"] = r.applicable;
  j["residual_or_margin"] = r.residual_or_margin;
  j["tolerance"] = r.tolerance;
  j["points"] = r.points;
  j["worst_point"] = r.worst_point;
  j["details"] = json::object();
  for (const auto& [k, v] : r.details) j["details"][k] = v;
  if (!r.note.empty()) j["note"] = r.note;
  if (!r.sub_checks.empty()) {
    j["sub_checks"] = json::array();
    for (const auto& s : r.sub_checks) j["sub_checks"].push_back(check_to_json(s));
  }
  return j;
}

json without_timestamp(json report) {
  report.erase("timestamp");
  return report;
}

namespace {

std::string num(const json& v) {
  if (!v.is_number()) return v.is_null() ? "nan" : v.dump();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.7g", v.get<double>());
  return buf;
}

void check_rows(std::ostringstream& out, const json& c, int depth) {
  const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  std::string name = depth ? indent + "- " + c["name"].get<std::string>() : c["name"].get<std::string>();
  out << "| " << name << " | " << c["metric"].get<std::string>() << " | " << c["kind"].get<std::string>() << " | "
      << c["verdict"].get<std::string>() << " | " << num(c["residual_or_margin"]) << " | " << num(c["tolerance"])
      << " | " << c["points"].get<std::size_t>() << " |\n";
  if (c.contains("sub_checks"))
    for (const auto& s : c["sub_checks"]) check_rows(out, s, depth + 1);
}

void detail_lines(std::ostringstream& out, const json& c) {
  const bool has_details = !c["details"].empty();
  if (!has_details && !c.contains("note")) return;
  out << "\n**" << c["name"].get<std::string>() << "** (" << c["metric"].get<std::string>() << ")";
  if (c.contains("note")) out << ": " << c["note"].get<std::string>();
  out << "\n\n";
  for (const auto& [k, v] : c["details"].items()) out << "- " << k << " = " << num(v) << "\n";
}

}  // namespace

std::string render_markdown(const json& report) {
  std::ostringstream out;
  out << "# curvlab report\n\n";
  out << "- version: " << report.value("version", "") << "\n";
  out << "- command: " << report["config"].value("command", "") << "\n";
  if (report.contains("timestamp")) out << "- timestamp: " << report["timestamp"].get<std::string>() << "\n";
  if (report.contains("status")) out << "- status: " << report["status"].get<std::string>() << "\n";
  out << "\n## Configuration\n\n```json\n" << report["config"].dump(2) << "\n```\n";

  if (report.contains("constants")) {
    out << "\n## Constants\n\n| n | C_n | E_n | pointwise threshold | integral factor | Okumura factor |\n"
           "|---|---|---|---|---|---|\n";
    for (const auto& c : report["constants"]) {
      out << "| " << c["n"] << " | " << num(c["C_n"]) << " | " << (c.contains("E_n") ? num(c["E_n"]) : "-")
          << " | " << num(c["pointwise_threshold"]) << " | " << num(c["integral_factor"]) << " | "
          << num(c["okumura_factor"]) << " |\n";
    }
  }
  if (report.contains("integrals")) {
    out << "\n## Integrals\n\n| field | kind | value | half-resolution value | refinement | nodes |\n"
           "|---|---|---|---|---|---|\n";
    for (const auto& i : report["integrals"]) {
      out << "| " << i["field"].get<std::string>() << " | " << i["kind"].get<std::string>() << " | "
          << num(i["value"]) << " | " << num(i["half_value"]) << " | " << num(i["refinement"]) << " | "
          << i["nodes"] << " |\n";
    }
  }
  if (report.contains("sobolev")) {
    out << "\n## Sobolev quotients\n\n| u | quotient | half-resolution | refinement | nodes |\n"
           "|---|---|---|---|---|\n";
    for (const auto& s : report["sobolev"]) {
      out << "| " << s["u"].get<std::string>() << " | " << num(s["quotient"]) << " | " << num(s["half_quotient"])
          << " | " << num(s["refinement"]) << " | " << s["nodes"] << " |\n";
    }
  }
  if (report.contains("checks") && !report["checks"].empty()) {
    out << "\n## Checks\n\n| check | metric | kind | verdict | residual/margin | tolerance | points |\n"
           "|---|---|---|---|---|---|---|\n";
    for (const auto& c : report["checks"]) check_rows(out, c, 0);
    out << "\n## Details\n";
    for (const auto& c : report["checks"]) detail_lines(out, c);
  }
  return out.str();
}

}  // namespace curvlab
