#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nucdim/error.hpp"
#include "nucdim/tools/report.hpp"
#include "nucdim/tools/scenario.hpp"

namespace {

using nucdim::tools::Json;

struct Flags {
  std::string input;
  std::string elements;
  std::optional<double> epsilon;
  std::optional<int> d, k, m;
  std::optional<std::size_t> N, n, lambda_grid;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> method;
  std::string out;
  bool timing = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("input", f.input, "Scenario file, or a bare system file")->required();
  sub->add_option("--epsilon", f.epsilon, "Tolerance parameter epsilon");
  sub->add_option("--d", f.d, "Covering dimension d");
  sub->add_option("--k", f.k, "Support radius k");
  sub->add_option("--m", f.m, "Tower half-length m");
  sub->add_option("--N", f.N, "Split threshold N");
  sub->add_option("--n", f.n, "Period for the periodic embedding");
  sub->add_option("--lambda-grid", f.lambda_grid, "Number of circle samples");
  sub->add_option("--tol", f.tol, "Norm tolerance");
  sub->add_option("--seed", f.seed, "Random seed");
  sub->add_option("--threads", f.threads, "Worker threads for norm sweeps");
  sub->add_option("--elements", f.elements, "JSON file with a list of element literals");
  sub->add_option("--method", f.method, "Marker construction: greedy, local or both");
  sub->add_option("--out", f.out, "Report path (stdout if omitted)");
  sub->add_flag("--timing", f.timing, "Record wall-clock time in the report");
}

Json read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw nucdim::Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::exception& ex) {
    throw nucdim::ParseError(path + ": " + ex.what());
  }
}

nucdim::tools::ScenarioConfig make_config(const std::string& command, const Flags& f) {
  auto cfg = nucdim::tools::load_scenario(f.input);
  if (!cfg.command.empty() && cfg.command != command)
    throw nucdim::PreconditionError("scenario is for '" + cfg.command + "', not '" + command + "'");
  cfg.command = command;
  auto& p = cfg.params;
  if (f.epsilon) p.epsilon = f.epsilon;
  if (f.d) p.d = f.d;
  if (f.k) p.k = f.k;
  if (f.m) p.m = f.m;
  if (f.N) p.N = f.N;
  if (f.n) p.n = f.n;
  if (f.lambda_grid) p.lambda_grid = f.lambda_grid;
  if (f.method) p.method = f.method;
  if (f.tol) p.tol = *f.tol;
  if (f.seed) p.seed = *f.seed;
  if (f.threads) p.threads = *f.threads;
  if (!f.elements.empty()) {
    const Json extra = read_file(f.elements);
    if (!extra.is_array()) throw nucdim::ParseError(f.elements + ": expected a list of element literals");
    for (const auto& lit : extra) cfg.elements.push_back(lit);
  }
  if (!f.out.empty()) cfg.out = f.out;
  cfg.timing = f.timing;
  return cfg;
}

int fail_with(const std::string& type, const std::string& message, const std::string& out) {
  const std::string text = nucdim::tools::to_deterministic_json(nucdim::tools::error_record(type, message));
  std::cerr << text;
  if (!out.empty() && out != "-") {
    std::ofstream f(out, std::ios::binary);
    f << text;
  }
  return 2;
}

template <class Fn>
int guarded(const std::string& out, Fn fn) {
  try {
    return fn();
  } catch (const nucdim::ParseError& ex) {
    return fail_with("parse", ex.what(), out);
  } catch (const nucdim::InvariantError& ex) {
    return fail_with("invariant", ex.what(), out);
  } catch (const nucdim::PreconditionError& ex) {
    return fail_with("precondition", ex.what(), out);
  } catch (const nucdim::Error& ex) {
    return fail_with("io", ex.what(), out);
  } catch (const std::exception& ex) {
    return fail_with("internal", ex.what(), out);
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-scale crossed products, markers, towers and approximations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(nucdim::tools::kToolVersion));

  Flags flags;
  const char* commands[][2] = {{"orbits", "Orbit decomposition and quotient fibers"},
                               {"markers", "Marker sets with exhaustive certificates"},
                               {"towers", "Rokhlin towers and their conditions"},
                               {"periodic", "Periodic embedding and primitive spectrum"},
                               {"norm", "Certified operator norms"},
                               {"approx", "Completely positive approximation with error bounds"}};
  for (auto& [name, help] : commands) add_common(app.add_subcommand(name, help), flags);

  std::string suite, suite_out;
  auto* va = app.add_subcommand("verify-all", "Run every scenario of a suite");
  va->add_option("suite", suite, "Suite file")->required();
  va->add_option("--out", suite_out, "Write the summary as JSON");

  CLI11_PARSE(app, argc, argv);

  if (va->parsed()) {
    return guarded(suite_out, [&] {
      const auto res = nucdim::tools::verify_all(suite, std::cout);
      if (!suite_out.empty()) {
        Json rows = Json::array();
        for (const auto& r : res.rows)
          rows.push_back({{"name", r.name}, {"pass", r.pass}, {"assertions", r.assertions}, {"failed", r.failed},
                          {"error", r.error}});
        std::ofstream f(suite_out, std::ios::binary);
        f << nucdim::tools::to_deterministic_json({{"scenarios", rows}, {"pass", res.passed()}});
      }
      return res.passed() ? 0 : 1;
    });
  }

  for (auto& [name, help] : commands) {
    auto* sub = app.get_subcommand(name);
    if (!sub->parsed()) continue;
    return guarded(flags.out, [&] {
      const auto cfg = make_config(name, flags);
      const auto report = nucdim::tools::run_scenario(cfg);
      nucdim::tools::emit_report(report, cfg.out.empty() ? "-" : cfg.out);
      return report.passed() ? 0 : 1;
    });
  }
  return 2;
}
