#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace nucdim::tools {

using Json = nlohmann::json;

inline constexpr const char* kToolName = "nucdim";
inline constexpr const char* kToolVersion = "0.1.0";

struct Assertion {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct RunReport {
  std::string command;
  Json scenario = Json::object();
  Json result = Json::object();
  std::vector<Assertion> assertions;
  std::optional<double> seconds; // only when timing was requested

  bool passed() const;
  Json to_json() const;
};

// Sorted keys, two-space indent, doubles printed with 17 significant digits.
std::string to_deterministic_json(const Json& j);

// "-" writes to stdout.
void emit_report(const RunReport& report, const std::string& path);
RunReport report_from_json(const Json& j);

Json error_record(const std::string& type, const std::string& message);

} // namespace nucdim::tools
