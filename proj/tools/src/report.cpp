#include "nucdim/tools/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nucdim/error.hpp"

namespace nucdim::tools {

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

void write(std::ostringstream& os, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
  case Json::value_t::object: {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << "{\n";
    bool first = true;
    // nlohmann's default object type is an ordered std::map, so keys come out sorted.
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) os << ",\n";
      first = false;
      os << inner << Json(it.key()).dump() << ": ";
      write(os, it.value(), indent + 1);
    }
    os << "\n" << pad << "}";
    return;
  }
  case Json::value_t::array: {
    if (j.empty()) {
      os << "[]";
      return;
    }
    os << "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) os << ",\n";
      os << inner;
      write(os, j[i], indent + 1);
    }
    os << "\n" << pad << "]";
    return;
  }
  case Json::value_t::number_float:
    os << format_double(j.get<double>());
    return;
  default:
    os << j.dump();
  }
}

} // namespace

bool RunReport::passed() const {
  for (const auto& a : assertions)
    if (!a.pass) return false;
  return true;
}

Json RunReport::to_json() const {
  Json rows = Json::array();
  for (const auto& a : assertions)
    rows.push_back({{"name", a.name}, {"measured", a.measured}, {"bound", a.bound}, {"pass", a.pass}});
  Json j = {{"tool", kToolName},  {"version", kToolVersion}, {"command", command},
            {"scenario", scenario}, {"result", result},      {"assertions", rows},
            {"pass", passed()}};
  if (seconds) j["timing"] = {{"seconds", *seconds}};
  return j;
}

std::string to_deterministic_json(const Json& j) {
  std::ostringstream os;
  write(os, j, 0);
  os << "\n";
  return os.str();
}

void emit_report(const RunReport& report, const std::string& path) {
  const std::string text = to_deterministic_json(report.to_json());
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("failed writing '" + path + "'");
}

RunReport report_from_json(const Json& j) {
  RunReport r;
  r.command = j.at("command").get<std::string>();
  r.scenario = j.at("scenario");
  r.result = j.at("result");
  for (const auto& row : j.at("assertions"))
    r.assertions.push_back({row.at("name").get<std::string>(), row.at("measured").get<double>(),
                            row.at("bound").get<double>(), row.at("pass").get<bool>()});
  if (j.contains("timing")) r.seconds = j["timing"].at("seconds").get<double>();
  return r;
}

Json error_record(const std::string& type, const std::string& message) {
  return {{"tool", kToolName}, {"version", kToolVersion}, {"pass", false},
          {"error", {{"type", type}, {"message", message}}}};
}

} // namespace nucdim::tools
