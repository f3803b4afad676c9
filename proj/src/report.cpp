#include "sphf/report.hpp"

#include <algorithm>
#include <stdexcept>

namespace sphf::report {

void Report::sort_checks() {
  std::sort(checks.begin(), checks.end(),
            [](const Check& a, const Check& b) { return a.name < b.name; });
}

nlohmann::ordered_json to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["version"] = r.version;
  j["config"] = r.config;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["paper_anchor"] = c.anchor;
    jc["pass"] = c.pass;
    jc["m"] = c.m;
    jc["residual_support"] = c.residual_support;
    jc["wall_time_ms"] = c.wall_time_ms;
    if (!c.identity.empty()) {
      jc["identity"] = c.identity;
      jc["type"] = c.type;
      jc["rank"] = c.rank;
      jc["wall_time"] = c.wall_time_ms;
    }
    j["checks"].push_back(std::move(jc));
  }
  j["pass"] = r.pass();
  return j;
}

Report from_json(const nlohmann::ordered_json& j) {
  Report r;
  r.version = j.value("version", "1");
  if (j.contains("config")) r.config = j["config"];
  if (!j.contains("checks") || !j["checks"].is_array())
    throw std::invalid_argument("report: missing checks array");
  for (const auto& jc : j["checks"]) {
    Check c;
    c.name = jc.value("name", "");
    c.anchor = jc.value("paper_anchor", "");
    c.pass = jc.value("pass", false);
    c.m = jc.value("m", 0);
    if (jc.contains("residual_support"))
      for (const auto& s : jc["residual_support"]) c.residual_support.push_back(s);
    c.wall_time_ms = jc.value("wall_time_ms", 0.0);
    c.identity = jc.value("identity", "");
    c.type = jc.value("type", "");
    c.rank = jc.value("rank", 0);
    r.checks.push_back(std::move(c));
  }
  return r;
}

Report merge(const std::vector<Report>& reports) {
  if (reports.empty()) throw std::invalid_argument("report merge: no inputs");
  Report out;
  out.config["merged_from"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    out.config["merged_from"].push_back(r.config);
    for (const auto& c : r.checks) out.checks.push_back(c);
  }
  out.sort_checks();
  return out;
}

}  // namespace sphf::report
