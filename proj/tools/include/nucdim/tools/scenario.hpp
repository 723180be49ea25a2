#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nucdim/crossed_element.hpp"
#include "nucdim/dynsys.hpp"
#include "nucdim/tools/report.hpp"

namespace nucdim::tools {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

struct ScenarioParams {
  std::optional<double> epsilon;
  std::optional<int> d;
  std::optional<int> k;
  std::optional<int> m;
  std::optional<std::size_t> N;
  std::optional<std::size_t> n;            // period for the periodic command
  std::optional<std::size_t> lambda_grid;
  std::optional<std::string> method;       // markers: greedy, local or both
  double tol = 1e-3;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;

  Json to_json() const;
};

struct ScenarioConfig {
  std::string name;
  std::string command;
  std::filesystem::path base_dir;
  Json system;                      // path, inline points, {"cycles": ...} or {"rotation": ...}
  Json elements = Json::array();    // element literals
  Json random_elements;             // {"count", "radius", "seed"}
  Json e;                           // label -> value
  Json K;                           // labels; markers and towers default to the long cycles
  Json expect = Json::object();
  ScenarioParams params;
  std::string out;
  bool timing = false;

  Json echo() const;
};

// A scenario object, or a bare system document (then command must be supplied later).
ScenarioConfig scenario_from_json(const Json& j, const std::filesystem::path& base_dir);
ScenarioConfig load_scenario(const std::filesystem::path& path);

FiniteDynamicalSystem build_system(const Json& spec, const std::filesystem::path& base_dir);

// [{"power": i, "coeff": {"label": [re, im]}}, {"power": j, "constant": [re, im]},
//  {"power": j, "bump": {"cycle": c, "center": p, "width": w}}]
CrossedElement parse_element(const FiniteDynamicalSystem& sys, const Json& literal);
Json element_to_json(const CrossedElement& a);

// Random elements with support radius <= radius, scaled so sum_i sup|f_i| = 1.
std::vector<CrossedElement> random_contractions(const FiniteDynamicalSystem& sys, std::size_t count, int radius,
                                                std::uint64_t seed);

std::vector<CrossedElement> scenario_elements(const ScenarioConfig& cfg, const FiniteDynamicalSystem& sys);

// Throws nucdim::Error subclasses on I/O, parse and precondition failures.
RunReport run_scenario(const ScenarioConfig& cfg);

struct SuiteRow {
  std::string name;
  bool pass = false;
  std::size_t assertions = 0;
  std::size_t failed = 0;
  std::string error;
};

struct SuiteResult {
  std::vector<SuiteRow> rows;
  bool passed() const;
};

SuiteResult verify_all(const std::filesystem::path& suite, std::ostream& summary);

} // namespace nucdim::tools
