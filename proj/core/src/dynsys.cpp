#include "nucdim/dynsys.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "nucdim/error.hpp"

namespace nucdim {

struct FiniteDynamicalSystem::Data {
  std::vector<std::string> labels;
  std::unordered_map<std::string, PointIndex> lookup;
  std::vector<PointIndex> forward;
  std::vector<PointIndex> backward;
  std::optional<Metric> metric;
  int declared_dim = 0;
  OrbitDecomposition orbits;
};

namespace {

OrbitDecomposition decompose(const std::vector<std::string>& labels,
                             const std::vector<PointIndex>& forward) {
  const std::size_t n = forward.size();
  OrbitDecomposition out;
  out.index.assign(n, CyclePosition{0, 0});
  std::vector<bool> seen(n, false);
  for (PointIndex start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::vector<PointIndex> members;
    for (PointIndex x = start; !seen[x]; x = forward[x]) {
      seen[x] = true;
      members.push_back(x);
    }
    // Rotate so the cycle starts at its least label.
    auto least = std::min_element(members.begin(), members.end(),
                                  [&](PointIndex a, PointIndex b) { return labels[a] < labels[b]; });
    std::rotate(members.begin(), least, members.end());
    Cycle c{members.front(), std::move(members)};
    const std::size_t id = out.cycles.size();
    for (std::size_t p = 0; p < c.points.size(); ++p) out.index[c.points[p]] = {id, p};
    out.cycles.push_back(std::move(c));
  }
  return out;
}

void audit_metric(const Metric& m, const std::vector<std::string>& labels) {
  const std::size_t n = labels.size();
  double scale = 0.0;
  for (PointIndex a = 0; a < n; ++a)
    for (PointIndex b = 0; b < n; ++b) scale = std::max(scale, m(a, b));
  const double slack = 1e-12 * std::max(1.0, scale);
  for (PointIndex a = 0; a < n; ++a) {
    if (m(a, a) != 0.0)
      throw InvariantError("metric: distance from '" + labels[a] + "' to itself is nonzero");
    for (PointIndex b = a + 1; b < n; ++b) {
      if (!(m(a, b) > 0.0) || !std::isfinite(m(a, b)))
        throw InvariantError("metric: distance between '" + labels[a] + "' and '" + labels[b] +
                             "' must be positive and finite");
    }
  }
  for (PointIndex a = 0; a < n; ++a)
    for (PointIndex b = 0; b < n; ++b)
      for (PointIndex c = 0; c < n; ++c)
        if (m(a, c) > m(a, b) + m(b, c) + slack)
          throw InvariantError("metric: triangle inequality fails for '" + labels[a] + "', '" +
                               labels[b] + "', '" + labels[c] + "'");
}

std::string padded(std::size_t value, std::size_t width) {
  std::string s = std::to_string(value);
  if (s.size() < width) s.insert(0, width - s.size(), '0');
  return s;
}

std::size_t digits(std::size_t n) { return std::to_string(n == 0 ? 0 : n - 1).size(); }

} // namespace

FiniteDynamicalSystem FiniteDynamicalSystem::create(std::vector<std::string> labels,
                                                    std::vector<PointIndex> forward,
                                                    std::optional<Metric> metric, int declared_dim,
                                                    bool trusted_metric) {
  const std::size_t n = labels.size();
  if (forward.size() != n) throw InvariantError("forward map size differs from the number of points");
  if (declared_dim < 0) throw InvariantError("declared dimension must be nonnegative");

  auto data = std::make_shared<Data>();
  for (PointIndex i = 0; i < n; ++i) {
    if (!data->lookup.emplace(labels[i], i).second)
      throw InvariantError("duplicate point label '" + labels[i] + "'");
  }
  data->backward.assign(n, n);
  for (PointIndex i = 0; i < n; ++i) {
    const PointIndex t = forward[i];
    if (t >= n) throw InvariantError("forward image of '" + labels[i] + "' is not a point");
    if (data->backward[t] != n)
      throw InvariantError("not injective: '" + labels[data->backward[t]] + "' and '" + labels[i] +
                           "' both map to '" + labels[t] + "'");
    data->backward[t] = i;
  }
  if (metric) {
    if (metric->size() != n) throw InvariantError("metric size differs from the number of points");
    if (!trusted_metric) audit_metric(*metric, labels);
  }
  data->orbits = decompose(labels, forward);
  data->labels = std::move(labels);
  data->forward = std::move(forward);
  data->metric = std::move(metric);
  data->declared_dim = declared_dim;
  return FiniteDynamicalSystem(std::move(data));
}

std::size_t FiniteDynamicalSystem::size() const { return data_->labels.size(); }
const std::string& FiniteDynamicalSystem::label(PointIndex x) const { return data_->labels.at(x); }
const std::vector<std::string>& FiniteDynamicalSystem::labels() const { return data_->labels; }

std::optional<PointIndex> FiniteDynamicalSystem::find(std::string_view label) const {
  auto it = data_->lookup.find(std::string(label));
  if (it == data_->lookup.end()) return std::nullopt;
  return it->second;
}

PointIndex FiniteDynamicalSystem::index_of(std::string_view label) const {
  if (auto x = find(label)) return *x;
  throw PreconditionError("unknown point label '" + std::string(label) + "'");
}

PointIndex FiniteDynamicalSystem::forward(PointIndex x) const { return data_->forward.at(x); }
PointIndex FiniteDynamicalSystem::backward(PointIndex x) const { return data_->backward.at(x); }

PointIndex FiniteDynamicalSystem::shift(PointIndex x, std::int64_t n) const {
  const auto [c, p] = data_->orbits.index.at(x);
  const auto& pts = data_->orbits.cycles[c].points;
  const auto L = static_cast<std::int64_t>(pts.size());
  std::int64_t q = (static_cast<std::int64_t>(p) + n) % L;
  if (q < 0) q += L;
  return pts[static_cast<std::size_t>(q)];
}

Permutation FiniteDynamicalSystem::shift_permutation(std::int64_t n) const {
  Permutation perm(size());
  for (PointIndex x = 0; x < size(); ++x) perm[x] = shift(x, n);
  return perm;
}

int FiniteDynamicalSystem::declared_dim() const { return data_->declared_dim; }
bool FiniteDynamicalSystem::has_metric() const { return data_->metric.has_value(); }

const Metric& FiniteDynamicalSystem::metric() const {
  if (!data_->metric) throw PreconditionError("system carries no metric");
  return *data_->metric;
}

double FiniteDynamicalSystem::distance(PointIndex a, PointIndex b) const { return metric()(a, b); }

const OrbitDecomposition& FiniteDynamicalSystem::orbits() const { return data_->orbits; }

std::size_t FiniteDynamicalSystem::cycle_length_of(PointIndex x) const {
  return data_->orbits.cycles[data_->orbits.index.at(x).cycle].length();
}

FiniteDynamicalSystem load_system(std::string_view document) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("system document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("system document must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "points" && key != "map" && key != "metric" && key != "dimension")
      throw ParseError("system document: unknown field '" + key + "'");
  }
  if (!doc.contains("points") || !doc["points"].is_array())
    throw ParseError("system document: 'points' must be an array of strings");
  if (!doc.contains("map") || !doc["map"].is_object())
    throw ParseError("system document: 'map' must be an object");
  if (!doc.contains("dimension") || !doc["dimension"].is_number_integer())
    throw ParseError("system document: 'dimension' must be an integer");

  std::vector<std::string> labels;
  std::unordered_map<std::string, PointIndex> lookup;
  for (const auto& p : doc["points"]) {
    if (!p.is_string()) throw ParseError("system document: point labels must be strings");
    auto s = p.get<std::string>();
    if (!lookup.emplace(s, labels.size()).second)
      throw ParseError("system document: duplicate point '" + s + "'");
    labels.push_back(std::move(s));
  }
  auto resolve = [&](const std::string& s, const char* what) {
    auto it = lookup.find(s);
    if (it == lookup.end())
      throw ParseError(std::string("system document: ") + what + " refers to unknown point '" + s + "'");
    return it->second;
  };

  const std::size_t n = labels.size();
  std::vector<PointIndex> forward(n, n);
  for (const auto& [from, to] : doc["map"].items()) {
    if (!to.is_string()) throw ParseError("system document: map target of '" + from + "' must be a string");
    forward[resolve(from, "map")] = resolve(to.get<std::string>(), "map");
  }
  for (PointIndex i = 0; i < n; ++i)
    if (forward[i] == n) throw ParseError("system document: map has no image for '" + labels[i] + "'");

  std::optional<Metric> metric;
  if (doc.contains("metric")) {
    const auto& entries = doc["metric"];
    if (!entries.is_array()) throw ParseError("system document: 'metric' must be an array");
    Metric m(n);
    std::vector<bool> given(n * n, false);
    for (const auto& e : entries) {
      if (!e.is_array() || e.size() != 3 || !e[0].is_string() || !e[1].is_string() || !e[2].is_number())
        throw ParseError("system document: metric entries must be [p, q, distance]");
      const PointIndex a = resolve(e[0].get<std::string>(), "metric");
      const PointIndex b = resolve(e[1].get<std::string>(), "metric");
      const double v = e[2].get<double>();
      if (v < 0.0) throw InvariantError("metric: negative distance between '" + labels[a] + "' and '" + labels[b] + "'");
      if (given[a * n + b] && m(a, b) != v)
        throw InvariantError("metric: not symmetric between '" + labels[a] + "' and '" + labels[b] + "'");
      m.set(a, b, v);
      given[a * n + b] = given[b * n + a] = true;
    }
    for (PointIndex a = 0; a < n; ++a)
      for (PointIndex b = a + 1; b < n; ++b)
        if (!given[a * n + b])
          throw ParseError("system document: metric lacks the pair '" + labels[a] + "', '" + labels[b] + "'");
    metric = std::move(m);
  }
  return FiniteDynamicalSystem::create(std::move(labels), std::move(forward), std::move(metric),
                                       doc["dimension"].get<int>());
}

FiniteDynamicalSystem load_system_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open system file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_system(ss.str());
}

std::string system_to_json(const FiniteDynamicalSystem& sys) {
  nlohmann::ordered_json doc;
  doc["points"] = sys.labels();
  nlohmann::ordered_json map = nlohmann::ordered_json::object();
  for (PointIndex x = 0; x < sys.size(); ++x) map[sys.label(x)] = sys.label(sys.forward(x));
  doc["map"] = std::move(map);
  if (sys.has_metric()) {
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (PointIndex a = 0; a < sys.size(); ++a)
      for (PointIndex b = a + 1; b < sys.size(); ++b)
        entries.push_back({sys.label(a), sys.label(b), sys.distance(a, b)});
    doc["metric"] = std::move(entries);
  }
  doc["dimension"] = sys.declared_dim();
  return doc.dump();
}

FiniteDynamicalSystem make_cycle_system(std::span<const std::size_t> lengths, int d) {
  if (lengths.empty()) throw PreconditionError("make_cycle_system: no cycle lengths given");
  if (std::find(lengths.begin(), lengths.end(), std::size_t{0}) != lengths.end())
    throw PreconditionError("make_cycle_system: cycle length must be positive");
  const std::size_t total = std::accumulate(lengths.begin(), lengths.end(), std::size_t{0});
  const std::size_t longest = *std::max_element(lengths.begin(), lengths.end());
  const std::size_t cw = digits(lengths.size());
  const std::size_t pw = digits(longest);

  std::vector<std::string> labels;
  std::vector<PointIndex> forward;
  std::vector<std::size_t> cycle_of, pos_of;
  labels.reserve(total);
  for (std::size_t c = 0, offset = 0; c < lengths.size(); offset += lengths[c], ++c) {
    for (std::size_t p = 0; p < lengths[c]; ++p) {
      labels.push_back("c" + padded(c, cw) + "p" + padded(p, pw));
      forward.push_back(offset + (p + 1) % lengths[c]);
      cycle_of.push_back(c);
      pos_of.push_back(p);
    }
  }
  // Graph distance inside a cycle; a constant ten times the largest of those across cycles.
  const double across = 10.0 * std::max<double>(1.0, static_cast<double>(longest / 2));
  Metric m(total);
  for (PointIndex a = 0; a < total; ++a) {
    for (PointIndex b = a + 1; b < total; ++b) {
      if (cycle_of[a] != cycle_of[b]) {
        m.set(a, b, across);
      } else {
        const std::size_t L = lengths[cycle_of[a]];
        const std::size_t diff = pos_of[a] > pos_of[b] ? pos_of[a] - pos_of[b] : pos_of[b] - pos_of[a];
        m.set(a, b, static_cast<double>(std::min(diff, L - diff)));
      }
    }
  }
  return FiniteDynamicalSystem::create(std::move(labels), std::move(forward), std::move(m), d, true);
}

FiniteDynamicalSystem make_rotation_system(std::size_t q, std::int64_t p, int d) {
  if (q == 0) throw PreconditionError("make_rotation_system: q must be positive");
  const auto qq = static_cast<std::int64_t>(q);
  const std::size_t w = digits(q);
  std::vector<std::string> labels;
  std::vector<PointIndex> forward;
  for (std::size_t i = 0; i < q; ++i) {
    labels.push_back("r" + padded(i, w));
    std::int64_t t = (static_cast<std::int64_t>(i) + p) % qq;
    if (t < 0) t += qq;
    forward.push_back(static_cast<PointIndex>(t));
  }
  // Arc length on the unit circle.
  Metric m(q);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(q);
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = a + 1; b < q; ++b)
      m.set(a, b, step * static_cast<double>(std::min(b - a, q - (b - a))));
  return FiniteDynamicalSystem::create(std::move(labels), std::move(forward), std::move(m), d, true);
}

OrbitDecomposition orbit_decomposition(const FiniteDynamicalSystem& sys) { return sys.orbits(); }

InvariantSplit invariant_split(const FiniteDynamicalSystem& sys, std::size_t N) {
  if (N == 0) throw PreconditionError("invariant_split: N must be positive");
  InvariantSplit out;
  out.N = N;
  const auto& cycles = sys.orbits().cycles;
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    auto& target = cycles[c].length() <= N ? out.short_cycles : out.long_cycles;
    target.push_back(c);
  }
  out.short_part = cycle_points(sys, out.short_cycles);
  out.long_part = cycle_points(sys, out.long_cycles);
  return out;
}

PointSet cycle_points(const FiniteDynamicalSystem& sys, std::span<const std::size_t> cycles) {
  std::vector<PointIndex> pts;
  for (std::size_t c : cycles) {
    const auto& cyc = sys.orbits().cycles.at(c);
    pts.insert(pts.end(), cyc.points.begin(), cyc.points.end());
  }
  return make_point_set(std::move(pts));
}

QuotientReport quotient_report(const FiniteDynamicalSystem& sys) {
  QuotientReport r;
  r.declared_dim = sys.declared_dim();
  r.quotient_dim_plus_one = sys.declared_dim() + 1;
  for (std::size_t c = 0; c < sys.orbits().cycles.size(); ++c) {
    const auto& cyc = sys.orbits().cycles[c];
    const std::string L = std::to_string(cyc.length());
    r.fibers.push_back({c, sys.label(cyc.base), cyc.length(), cyc.length() == 1 ? "Z" : L + "Z",
                        "M_" + L + " over the circle", 1});
    r.sup_fiber_dimnuc_plus_one = 2;
  }
  r.bound_plus_one = r.quotient_dim_plus_one * r.sup_fiber_dimnuc_plus_one;
  return r;
}

FiniteDynamicalSystem restrict_system(const FiniteDynamicalSystem& sys, const PointSet& invariant) {
  std::vector<std::size_t> local(sys.size(), sys.size());
  for (std::size_t i = 0; i < invariant.size(); ++i) local[invariant[i]] = i;
  std::vector<std::string> labels;
  std::vector<PointIndex> forward;
  for (PointIndex x : invariant) {
    const PointIndex fx = sys.forward(x);
    if (local[fx] == sys.size())
      throw PreconditionError("restrict_system: subset is not invariant at '" + sys.label(x) + "'");
    labels.push_back(sys.label(x));
    forward.push_back(local[fx]);
  }
  std::optional<Metric> metric;
  if (sys.has_metric()) {
    Metric m(invariant.size());
    for (std::size_t a = 0; a < invariant.size(); ++a)
      for (std::size_t b = a + 1; b < invariant.size(); ++b)
        m.set(a, b, sys.distance(invariant[a], invariant[b]));
    metric = std::move(m);
  }
  return FiniteDynamicalSystem::create(std::move(labels), std::move(forward), std::move(metric),
                                       sys.declared_dim(), true);
}

} // namespace nucdim
