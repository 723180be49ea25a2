#include "nucdim/tools/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "nucdim/approx.hpp"
#include "nucdim/error.hpp"
#include "nucdim/markers.hpp"
#include "nucdim/norm.hpp"
#include "nucdim/periodic.hpp"
#include "nucdim/towers.hpp"

namespace nucdim::tools {

namespace {

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::exception& ex) {
    throw ParseError(path.string() + ": " + ex.what());
  }
}

Complex to_complex(const Json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ParseError("expected a number or [re, im], got " + v.dump());
}

Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

PointIndex lookup(const FiniteDynamicalSystem& sys, const std::string& label) {
  auto x = sys.find(label);
  if (!x) throw ParseError("unknown point label '" + label + "'");
  return *x;
}

template <class T>
std::optional<T> optional_field(const Json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  try {
    return j[key].get<T>();
  } catch (const Json::exception&) {
    throw ParseError(std::string("parameter '") + key + "' has the wrong type");
  }
}

template <class T>
T required(const std::optional<T>& v, const char* name) {
  if (!v) throw PreconditionError(std::string("missing parameter '") + name + "'");
  return *v;
}

Json labels_of(const FiniteDynamicalSystem& sys, const PointSet& pts) {
  Json out = Json::array();
  for (PointIndex x : pts) out.push_back(sys.label(x));
  return out;
}

PointSet parse_labels(const FiniteDynamicalSystem& sys, const Json& j) {
  if (!j.is_array()) throw ParseError("K must be a list of labels");
  std::vector<PointIndex> pts;
  for (const auto& v : j) pts.push_back(lookup(sys, v.get<std::string>()));
  return make_point_set(std::move(pts));
}

PointSet long_cycle_points(const FiniteDynamicalSystem& sys, std::size_t threshold) {
  std::vector<std::size_t> cycles;
  const auto& cs = sys.orbits().cycles;
  for (std::size_t c = 0; c < cs.size(); ++c)
    if (cs[c].length() > threshold) cycles.push_back(c);
  return cycle_points(sys, cycles);
}

void add(RunReport& r, std::string name, double measured, double bound) {
  r.assertions.push_back({std::move(name), measured, bound, measured <= bound});
}

void add_flag(RunReport& r, std::string name, bool ok) {
  r.assertions.push_back({std::move(name), ok ? 0.0 : 1.0, 0.0, ok});
}

std::string rational_string(const Rational& q) {
  std::ostringstream os;
  os << q.numerator() << "/" << q.denominator();
  return os.str();
}

Json certificate_json(const FiniteDynamicalSystem& sys, const MarkerCertificate& c) {
  return {{"Z", labels_of(sys, c.Z)},
          {"m", c.m},
          {"d", c.d},
          {"K_size", c.K.size()},
          {"translates_disjoint", c.translates_disjoint},
          {"covers_K", c.covers_K}};
}

// ---- commands ----

RunReport run_orbits(const ScenarioConfig& cfg, const FiniteDynamicalSystem& sys) {
  RunReport r;
  const auto& cycles = sys.orbits().cycles;
  Json cyc = Json::array();
  std::vector<std::size_t> lengths;
  std::size_t total = 0;
  for (const auto& c : cycles) {
    cyc.push_back({{"base", sys.label(c.base)}, {"length", c.length()}});
    lengths.push_back(c.length());
    total += c.length();
  }
  std::sort(lengths.begin(), lengths.end());
  const auto q = quotient_report(sys);
  Json fibers = Json::array();
  for (const auto& f : q.fibers)
    fibers.push_back({{"base", f.base_label}, {"length", f.length}, {"stabilizer", f.stabilizer}, {"fiber", f.fiber},
                      {"fiber_dimnuc", f.fiber_dimnuc}});
  r.result = {{"points", sys.size()},
              {"cycles", cyc},
              {"lengths", lengths},
              {"quotient", {{"fibers", fibers},
                            {"declared_dim", q.declared_dim},
                            {"bound_plus_one", q.bound_plus_one},
                            {"sup_fiber_dimnuc_plus_one", q.sup_fiber_dimnuc_plus_one}}}};
  add(r, "cycles_partition_points", std::abs(static_cast<double>(total) - static_cast<double>(sys.size())), 0.0);
  if (cfg.expect.contains("lengths")) {
    auto want = cfg.expect["lengths"].get<std::vector<std::size_t>>();
    std::sort(want.begin(), want.end());
    add_flag(r, "expected_lengths", want == lengths);
  }
  return r;
}

RunReport run_markers(const ScenarioConfig& cfg, const FiniteDynamicalSystem& sys) {
  RunReport r;
  const int m = required(cfg.params.m, "m");
  const int d = cfg.params.d.value_or(sys.declared_dim());
  const std::string method = cfg.params.method.value_or("greedy");
  if (method != "greedy" && method != "local" && method != "both")
    throw PreconditionError("method must be greedy, local or both");
  const std::size_t threshold = static_cast<std::size_t>(d + 1) * static_cast<std::size_t>(4 * m + 1);
  const PointSet K = cfg.K.is_null() ? long_cycle_points(sys, threshold) : parse_labels(sys, cfg.K);
  r.result["K"] = labels_of(sys, K);
  const auto record = [&](const std::string& name, const MarkerCertificate& c) {
    r.result[name] = certificate_json(sys, c);
    add_flag(r, name + "_translates_disjoint", c.translates_disjoint);
    add_flag(r, name + "_covers_K", c.covers_K);
  };
  if (method != "local") record("greedy", verify_marker_certificate(sys, greedy_markers(sys, m, K, d).Z, m, d, K));
  if (method != "greedy") {
    if (d != sys.declared_dim()) throw PreconditionError("the local construction uses the declared dimension");
    record("local", local_marker_certificate(sys, m, K));
  }
  return r;
}

RunReport run_towers(const ScenarioConfig& cfg, const FiniteDynamicalSystem& sys) {
  RunReport r;
  const int d = cfg.params.d.value_or(sys.declared_dim());
  const int k = cfg.params.k.value_or(1);
  const double eps = required(cfg.params.epsilon, "epsilon");
  const std::int64_t kp = static_cast<std::int64_t>(k) * ceil_inverse(eps);
  const int m = cfg.params.m.value_or(static_cast<int>((2 * d + 3) * kp));
  const std::size_t threshold = static_cast<std::size_t>(d + 1) * static_cast<std::size_t>(4 * m + 1);
  const PointSet K = cfg.K.is_null() ? long_cycle_points(sys, threshold) : parse_labels(sys, cfg.K);
  const TowerFamily fam = build_tower_family(sys, K, d, k, m, eps);
  const TowerVerification v = verify_tower(sys, fam);
  Json levels = Json::array();
  for (std::size_t l = 0; l < fam.levels.size(); ++l) {
    std::size_t nonzero = 0;
    for (const auto& [j, f] : fam.levels[l]) nonzero += f.entries().size();
    levels.push_back({{"l", l}, {"shift", fam.supports.shifts[l]}, {"Z", labels_of(sys, fam.supports.supports[l])},
                      {"nonzero_values", nonzero}});
  }
  r.result = {{"d", d},
              {"k", k},
              {"m", m},
              {"epsilon", eps},
              {"k_prime", fam.k_prime},
              {"K_size", K.size()},
              {"K_prime_size", fam.K_prime.size()},
              {"towers", levels},
              {"max_step", rational_string(v.max_step)},
              {"step_bound", rational_string(v.step_bound)},
              {"max_sum_deviation", rational_string(v.max_sum_deviation)}};
  r.assertions.push_back({"step", v.max_step_float, to_double(v.step_bound), v.step_ok});
  r.assertions.push_back({"sum_to_one", v.max_sum_deviation_float, 1e-12, v.sum_ok});
  add_flag(r, "supports_disjoint", v.supports_disjoint);
  add_flag(r, "supports_contained", v.supports_contained);
  add_flag(r, "values_in_unit_interval", v.values_in_unit);
  return r;
}

RunReport run_periodic(const ScenarioConfig& cfg, const FiniteDynamicalSystem& sys) {
  RunReport r;
  const std::size_t n = cfg.params.n.value_or(system_period(sys));
  const std::size_t grid = cfg.params.lambda_grid.value_or(64);
  const PeriodicEmbedding emb = periodic_embedding(sys, n, grid);
  std::mt19937_64 rng(cfg.params.seed);
  std::normal_distribution<double> gauss;
  Function f(sys.size());
  for (auto& v : f) v = Complex(gauss(rng), gauss(rng));
  const auto elems = random_contractions(sys, 1, 2, cfg.params.seed + 1);
  const double unit = emb.unitarity_residual();
  const double cov = emb.covariance_residual(f);
  const double square = elems.empty() ? 0.0 : emb.commuting_square_residual(elems[0]);
  const double trip = elems.empty() ? 0.0 : emb.round_trip_residual(elems[0]);

  std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
  double holo = 0.0;
  for (int k = 1; k <= 8; ++k) {
    Matrix v = Matrix::Zero(k, k);
    Complex prod = 1.0;
    for (int j = 0; j < k; ++j) {
      const Complex lj = std::polar(1.0, angle(rng));
      prod *= lj;
      if (j + 1 < k) v(j, j + 1) = lj;
      else v(k - 1, 0) = lj;
    }
    Matrix pw = Matrix::Identity(k, k);
    for (int j = 0; j < k; ++j) pw = pw * v;
    const Complex lam = holonomy_lambda(v);
    holo = std::max({holo, std::abs(lam - pw(0, 0)), std::abs(lam - prod),
                     (pw - pw(0, 0) * Matrix::Identity(k, k)).cwiseAbs().maxCoeff()});
  }
  const auto prim = prim_spectrum(sys);
  Json strata = Json::array();
  for (const auto& s : prim.strata)
    strata.push_back({{"k", s.k}, {"orbits", s.orbit_count}, {"points", s.point_count}, {"description", s.description}});
  r.result = {{"period", n},
              {"grid", grid},
              {"unitarity_residual", unit},
              {"covariance_residual", cov},
              {"commuting_square_residual", square},
              {"round_trip_residual", trip},
              {"holonomy_residual", holo},
              {"prim_spectrum",
               {{"strata", strata}, {"period", prim.period}, {"max_irreducible_dimension", prim.max_irreducible_dimension}}}};
  add(r, "unitarity", unit, 1e-12);
  add(r, "covariance", cov, 1e-12);
  add(r, "commuting_square", square, 1e-9);
  add(r, "round_trip", trip, 1e-9);
  add(r, "holonomy", holo, 1e-10);
  add(r, "irreducible_dimension_le_period", static_cast<double>(prim.max_irreducible_dimension), static_cast<double>(n));
  return r;
}

RunReport run_norm(const ScenarioConfig& cfg, const FiniteDynamicalSystem& sys) {
  RunReport r;
  NormOptions opts;
  opts.tol = cfg.params.tol;
  opts.seed = cfg.params.seed;
  opts.threads = cfg.params.threads;
  const auto elems = scenario_elements(cfg, sys);
  Json out = Json::array();
  std::vector<NormResult> results;
  for (const auto& a : elems) {
    const NormResult n = norm(a, opts);
    Json per = Json::array();
    for (const auto& o : n.per_orbit)
      per.push_back({{"base", sys.label(sys.orbits().cycles[o.cycle].base)},
                     {"length", o.length},
                     {"value", o.value},
                     {"argmax_lambda", complex_json(o.argmax_lambda)},
                     {"grid", o.grid},
                     {"exact", o.exact}});
    out.push_back({{"value", n.value}, {"tol", n.tol}, {"upper", n.upper()}, {"grid", n.grid}, {"per_orbit", per}});
    results.push_back(n);
  }
  r.result = {{"norms", out}};
  if (cfg.expect.contains("values")) {
    const auto want = cfg.expect["values"].get<std::vector<double>>();
    if (want.size() != results.size()) throw PreconditionError("expect.values must have one entry per element");
    for (std::size_t i = 0; i < want.size(); ++i)
      add(r, "norm_" + std::to_string(i), std::abs(results[i].value - want[i]), results[i].tol);
  }
  return r;
}

Json claim_json(const ClaimMeasure& c) {
  return {{"per_member", c.per_member}, {"max", c.max}, {"bound", c.bound}, {"pass", c.pass()}};
}

RunReport run_approx(const ScenarioConfig& cfg, const FiniteDynamicalSystem& sys) {
  RunReport r;
  const double eps = required(cfg.params.epsilon, "epsilon");
  ApproxOptions opts;
  opts.d = cfg.params.d;
  opts.N = cfg.params.N;
  opts.norm.tol = cfg.params.tol;
  opts.norm.seed = cfg.params.seed;
  opts.norm.threads = cfg.params.threads;
  opts.seed = cfg.params.seed;
  if (!cfg.e.is_null()) {
    std::vector<double> e(sys.size(), 0.0);
    for (auto it = cfg.e.begin(); it != cfg.e.end(); ++it) e[lookup(sys, it.key())] = it.value().get<double>();
    opts.e = std::move(e);
  }
  const auto F = scenario_elements(cfg, sys);
  const ApproxReport rep = run_approximation(sys, F, eps, opts);
  const auto& p = rep.params;
  const auto& cycles = sys.orbits().cycles;
  const auto lengths = [&](const std::vector<std::size_t>& ids) {
    std::vector<std::size_t> out;
    for (std::size_t c : ids) out.push_back(cycles[c].length());
    return out;
  };
  Json towers = nullptr;
  if (rep.towers)
    towers = {{"count", rep.tower_count},
              {"max_step", rational_string(rep.towers->max_step)},
              {"step_bound", rational_string(rep.towers->step_bound)},
              {"max_sum_deviation", rational_string(rep.towers->max_sum_deviation)},
              {"passed", rep.towers->passed()}};
  const auto& L = rep.ledger;
  r.result = {
      {"params",
       {{"epsilon", p.epsilon},
        {"d", p.d},
        {"k", p.k},
        {"epsilon_prime", p.epsilon_prime},
        {"ceil_inverse_epsilon_prime", p.ceil_inverse_epsilon_prime},
        {"m", p.m},
        {"N", p.N},
        {"N_formula", p.N_formula},
        {"Y_cycle_lengths", lengths(p.split.short_cycles)},
        {"complement_cycle_lengths", lengths(p.split.long_cycles)},
        {"ideal_path_active", p.ideal_path_active},
        {"member_norms", p.member_norms}}},
      {"quasicentral_unit",
       {{"supplied", rep.unit.supplied},
        {"central", rep.unit.central},
        {"commutator", rep.unit.commutator},
        {"splitting", rep.unit.splitting}}},
      {"towers", towers},
      {"sqrt_step", {{"max", rep.sqrt_step}, {"bound", rep.sqrt_step_bound}}},
      {"quotient",
       {{"cycle_lengths", lengths(rep.quotient_cycles)},
        {"samples", rep.quotient_samples},
        {"error", claim_json(rep.quotient)}}},
      {"claim1", claim_json(rep.claim1)},
      {"claim2", claim_json(rep.claim2)},
      {"final", claim_json(rep.final_error)},
      {"checks",
       {{"ran", rep.checks.ran},
        {"min_psd_eigenvalue", rep.checks.min_psd_eigenvalue},
        {"contractivity_excess", rep.checks.contractivity_excess},
        {"multiplicativity", rep.checks.multiplicativity},
        {"adjoint", rep.checks.adjoint},
        {"order_zero", rep.checks.order_zero}}},
      {"ledger",
       {{"d", L.d},
        {"quotient_term", L.quotient_term},
        {"ideal_term_declared", L.ideal_term_declared},
        {"ideal_term_actual", L.ideal_term_actual},
        {"ledger_total", L.ledger_total},
        {"theorem_bound", L.theorem_bound},
        {"actual_total", L.actual_total},
        {"summand_count", L.summand_count},
        {"remark_d1", L.remark_d1},
        {"remark_d2", L.remark_d2},
        {"remark_total", L.remark_total},
        {"consistent", L.consistent}}},
      {"summand_count", rep.summand_count}};
  for (const auto& row : rep.assertions) r.assertions.push_back({row.name, row.measured, row.bound, row.pass});
  return r;
}

} // namespace

Json ScenarioParams::to_json() const {
  Json j = {{"tol", tol}, {"seed", seed}, {"threads", threads}};
  if (epsilon) j["epsilon"] = *epsilon;
  if (d) j["d"] = *d;
  if (k) j["k"] = *k;
  if (m) j["m"] = *m;
  if (N) j["N"] = *N;
  if (n) j["n"] = *n;
  if (lambda_grid) j["lambda_grid"] = *lambda_grid;
  if (method) j["method"] = *method;
  return j;
}

Json ScenarioConfig::echo() const {
  Json j = {{"command", command}, {"params", params.to_json()}};
  if (!name.empty()) j["name"] = name;
  if (system.is_string()) j["system"] = system;
  else if (system.is_object() && !system.contains("points")) j["system"] = system;
  else j["system"] = "inline";
  if (!elements.empty()) j["elements"] = elements.size();
  if (!random_elements.is_null()) j["random_elements"] = random_elements;
  if (!e.is_null()) j["e"] = "supplied";
  if (!expect.empty()) j["expect"] = expect;
  return j;
}

ScenarioConfig scenario_from_json(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ParseError("scenario must be a JSON object");
  ScenarioConfig cfg;
  cfg.base_dir = base_dir;
  if (j.contains("points")) {
    cfg.system = j;
    return cfg;
  }
  static const std::vector<std::string> known = {"name",   "command", "system", "elements", "random_elements",
                                                 "e",      "K",       "expect", "params",   "out"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ParseError("unknown scenario field '" + it.key() + "'");
  cfg.name = j.value("name", "");
  cfg.command = j.value("command", "");
  if (!j.contains("system")) throw ParseError("scenario has no 'system'");
  cfg.system = j["system"];
  if (j.contains("elements")) cfg.elements = j["elements"];
  if (j.contains("random_elements")) cfg.random_elements = j["random_elements"];
  if (j.contains("e")) cfg.e = j["e"];
  if (j.contains("K")) cfg.K = j["K"];
  if (j.contains("expect")) cfg.expect = j["expect"];
  cfg.out = j.value("out", "");
  if (j.contains("params")) {
    const Json& p = j["params"];
    auto& P = cfg.params;
    P.epsilon = optional_field<double>(p, "epsilon");
    P.d = optional_field<int>(p, "d");
    P.k = optional_field<int>(p, "k");
    P.m = optional_field<int>(p, "m");
    P.N = optional_field<std::size_t>(p, "N");
    P.n = optional_field<std::size_t>(p, "n");
    P.lambda_grid = optional_field<std::size_t>(p, "lambda_grid");
    P.method = optional_field<std::string>(p, "method");
    P.tol = optional_field<double>(p, "tol").value_or(P.tol);
    P.seed = optional_field<std::uint64_t>(p, "seed").value_or(P.seed);
    P.threads = optional_field<unsigned>(p, "threads").value_or(P.threads);
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_json_file(path), path.parent_path());
}

FiniteDynamicalSystem build_system(const Json& spec, const std::filesystem::path& base_dir) {
  if (spec.is_string()) {
    std::filesystem::path p = spec.get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    return load_system_file(p);
  }
  if (!spec.is_object()) throw ParseError("system must be a path or an object");
  if (spec.contains("points")) return load_system(spec.dump());
  const int d = spec.value("dimension", 0);
  if (spec.contains("cycles")) {
    const auto lengths = spec["cycles"].get<std::vector<std::size_t>>();
    return make_cycle_system(lengths, d);
  }
  if (spec.contains("rotation")) {
    const Json& rot = spec["rotation"];
    return make_rotation_system(rot.at("q").get<std::size_t>(), rot.at("p").get<std::int64_t>(), spec.value("dimension", 1));
  }
  throw ParseError("system object needs 'points', 'cycles' or 'rotation'");
}

CrossedElement parse_element(const FiniteDynamicalSystem& sys, const Json& literal) {
  if (!literal.is_array()) throw ParseError("element literal must be a list of terms");
  CrossedElement a(sys);
  for (const auto& term : literal) {
    if (!term.is_object() || !term.contains("power")) throw ParseError("element term needs a 'power'");
    const int power = term["power"].get<int>();
    Function f(sys.size(), 0.0);
    if (term.contains("constant")) {
      std::fill(f.begin(), f.end(), to_complex(term["constant"]));
    } else if (term.contains("coeff")) {
      const Json& c = term["coeff"];
      if (!c.is_object()) throw ParseError("'coeff' must map labels to values");
      for (auto it = c.begin(); it != c.end(); ++it) f[lookup(sys, it.key())] = to_complex(it.value());
    } else if (term.contains("bump")) {
      const Json& b = term["bump"];
      const auto& cycles = sys.orbits().cycles;
      const auto ci = b.at("cycle").get<std::size_t>();
      if (ci >= cycles.size()) throw ParseError("bump refers to a missing cycle");
      const auto& cyc = cycles[ci];
      const double centre = b.at("center").get<double>();
      const double width = b.at("width").get<double>();
      if (!(width > 0.0)) throw ParseError("bump width must be positive");
      const double L = static_cast<double>(cyc.length());
      for (std::size_t pos = 0; pos < cyc.length(); ++pos) {
        double dist = std::abs(static_cast<double>(pos) - centre);
        dist = std::min(dist, L - dist);
        f[cyc.points[pos]] = std::max(0.0, 1.0 - dist / width);
      }
    } else {
      throw ParseError("element term needs 'coeff', 'constant' or 'bump'");
    }
    a.add_to_coefficient(power, f);
  }
  return a;
}

Json element_to_json(const CrossedElement& a) {
  Json out = Json::array();
  const auto& sys = a.host();
  for (const auto& [i, f] : a.coefficients()) {
    Json coeff = Json::object();
    for (PointIndex x = 0; x < f.size(); ++x)
      if (f[x] != Complex(0.0)) coeff[sys.label(x)] = complex_json(f[x]);
    out.push_back({{"power", i}, {"coeff", coeff}});
  }
  return out;
}

std::vector<CrossedElement> random_contractions(const FiniteDynamicalSystem& sys, std::size_t count, int radius,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<CrossedElement> out;
  if (sys.size() == 0) return out;
  for (std::size_t c = 0; c < count; ++c) {
    CrossedElement a(sys);
    for (int i = -radius; i <= radius; ++i) {
      Function f(sys.size());
      for (auto& v : f) v = Complex(gauss(rng), gauss(rng));
      a.set_coefficient(i, std::move(f));
    }
    a *= Complex(1.0 / coefficient_bound(a), 0.0);
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<CrossedElement> scenario_elements(const ScenarioConfig& cfg, const FiniteDynamicalSystem& sys) {
  std::vector<CrossedElement> out;
  if (!cfg.elements.is_array()) throw ParseError("'elements' must be a list of element literals");
  for (const auto& lit : cfg.elements) out.push_back(parse_element(sys, lit));
  if (!cfg.random_elements.is_null()) {
    const Json& r = cfg.random_elements;
    auto more = random_contractions(sys, r.at("count").get<std::size_t>(), r.value("radius", 1),
                                    r.value("seed", cfg.params.seed));
    for (auto& a : more) out.push_back(std::move(a));
  }
  return out;
}

RunReport run_scenario(const ScenarioConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const FiniteDynamicalSystem sys = build_system(cfg.system, cfg.base_dir);
  RunReport r;
  if (cfg.command == "orbits") r = run_orbits(cfg, sys);
  else if (cfg.command == "markers") r = run_markers(cfg, sys);
  else if (cfg.command == "towers") r = run_towers(cfg, sys);
  else if (cfg.command == "periodic") r = run_periodic(cfg, sys);
  else if (cfg.command == "norm") r = run_norm(cfg, sys);
  else if (cfg.command == "approx") r = run_approx(cfg, sys);
  else throw PreconditionError("unknown command '" + cfg.command + "'");
  r.command = cfg.command;
  r.scenario = cfg.echo();
  if (cfg.timing)
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

bool SuiteResult::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const SuiteRow& r) { return r.pass; });
}

SuiteResult verify_all(const std::filesystem::path& suite, std::ostream& summary) {
  const Json j = read_json_file(suite);
  if (!j.is_object() || !j.contains("scenarios") || !j["scenarios"].is_array())
    throw ParseError("suite must be an object with a 'scenarios' list");
  const auto base = suite.parent_path();
  SuiteResult res;
  for (std::size_t i = 0; i < j["scenarios"].size(); ++i) {
    const Json& entry = j["scenarios"][i];
    SuiteRow row;
    row.name = entry.is_string() ? entry.get<std::string>() : entry.value("name", "scenario_" + std::to_string(i));
    try {
      const ScenarioConfig cfg = entry.is_string()
                                     ? load_scenario(base / entry.get<std::string>())
                                     : scenario_from_json(entry, base);
      const RunReport rep = run_scenario(cfg);
      row.assertions = rep.assertions.size();
      row.failed = static_cast<std::size_t>(
          std::count_if(rep.assertions.begin(), rep.assertions.end(), [](const Assertion& a) { return !a.pass; }));
      row.pass = row.failed == 0;
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
    res.rows.push_back(std::move(row));
  }
  std::size_t width = 8;
  for (const auto& r : res.rows) width = std::max(width, r.name.size());
  summary << std::left << std::setw(static_cast<int>(width)) << "scenario" << "  status  passed\n";
  for (const auto& r : res.rows) {
    summary << std::left << std::setw(static_cast<int>(width)) << r.name << "  ";
    if (!r.error.empty()) summary << "ERROR   " << r.error << "\n";
    else summary << (r.pass ? "PASS    " : "FAIL    ") << (r.assertions - r.failed) << "/" << r.assertions << "\n";
  }
  return res;
}

} // namespace nucdim::tools
