#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace sphf::report {

struct Check {
  std::string name;
  std::string anchor;  // stable identifier of the verified statement
  bool pass = false;
  int m = 0;
  std::vector<std::string> residual_support;
  double wall_time_ms = 0;
  // optional identity-check annotations (used by the dynamical-matrix suites)
  std::string identity, type;
  int rank = 0;
};

struct Report {
  std::string version = "1";
  nlohmann::ordered_json config;
  std::vector<Check> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  void sort_checks();
};

nlohmann::ordered_json to_json(const Report& r);
Report from_json(const nlohmann::ordered_json& j);

// merged summary; throws std::invalid_argument on an empty input list
Report merge(const std::vector<Report>& reports);

}  // namespace sphf::report
