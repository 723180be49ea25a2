#include "nucdim/towers.hpp"

#include <algorithm>
#include <cmath>

#include "nucdim/error.hpp"

namespace nucdim {

SparseFunction::SparseFunction(std::vector<std::pair<PointIndex, Rational>> entries)
    : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::erase_if(entries_, [](const auto& e) { return e.second == Rational(0); });
}

Rational SparseFunction::at(PointIndex x) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), x,
                             [](const auto& e, PointIndex p) { return e.first < p; });
  return (it != entries_.end() && it->first == x) ? it->second : Rational(0);
}

PointSet SparseFunction::support() const {
  PointSet out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.first);
  return out;
}

Rational SparseFunction::sup() const {
  Rational best(0);
  for (const auto& e : entries_) best = std::max(best, e.second);
  return best;
}

Rational TowerFamily::value(std::size_t l, int j, PointIndex x) const {
  const auto& level = levels.at(l);
  auto it = level.find(j);
  return it == level.end() ? Rational(0) : it->second.at(x);
}

std::int64_t ceil_inverse(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw PreconditionError("epsilon must be positive and finite");
  const double x = 1.0 / eps;
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-12 * x) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(x));
}

bool tower_length_ok(int d, int k, int m) {
  return 2LL * m >= 2LL * (2 * d + 3) * k - d - 2;
}

TowerSupports tower_supports(const FiniteDynamicalSystem& sys, const MarkerCertificate& cert,
                             int d, int k, int m) {
  if (k < 1 || m < 1 || d < 0) throw PreconditionError("tower_supports: need k >= 1, m >= 1, d >= 0");
  if (!tower_length_ok(d, k, m))
    throw PreconditionError("tower_supports: m=" + std::to_string(m) + " is below (2d+3)k - d/2 - 1 for d=" +
                            std::to_string(d) + ", k=" + std::to_string(k));
  if (!cert.valid() || cert.m != m || cert.d != d)
    throw PreconditionError("tower_supports: marker certificate missing, invalid or for other parameters");

  TowerSupports out;
  out.d = d;
  out.k = k;
  out.m = m;
  const std::int64_t stride = 2LL * (m - k) + 1;
  for (int l = 0; l <= 2 * d + 2; ++l) {
    const std::int64_t s = stride * l + (m - k) + 1;
    out.shifts.push_back(s);
    out.supports.push_back(image(cert.Z, sys.shift_permutation(s)));
  }

  out.translates_disjoint = std::all_of(out.supports.begin(), out.supports.end(), [&](const PointSet& Zl) {
    return verify_marker_certificate(sys, Zl, m, d, {}).translates_disjoint;
  });
  PointSet reach;
  for (const auto& Zl : out.supports)
    for (int i = -(m - k); i <= m - k; ++i) reach = set_union(reach, image(Zl, sys.shift_permutation(i)));
  out.covers_K = set_difference(cert.K, reach).empty();
  if (!out.translates_disjoint || !out.covers_K)
    throw InvariantError("tower_supports: shifted supports fail the disjointness or covering check");
  return out;
}

PartitionOfUnity build_partition(const FiniteDynamicalSystem& sys, const TowerSupports& supports,
                                 int m, int k_prime, const PointSet& K_prime) {
  if (k_prime > m) throw PreconditionError("build_partition: k' exceeds m");
  const int reach = m - k_prime;
  std::vector<std::int64_t> count(sys.size(), 0);
  std::vector<bool> in_K(sys.size(), false);
  for (PointIndex x : K_prime) in_K[x] = true;

  // Every (l, j, point) with the point in shift_j(Z^{(l)}) and in K'.
  struct Hit {
    std::size_t l;
    int j;
    PointIndex x;
  };
  std::vector<Hit> hits;
  for (std::size_t l = 0; l < supports.supports.size(); ++l)
    for (PointIndex z : supports.supports[l])
      for (int j = -reach; j <= reach; ++j) {
        const PointIndex x = sys.shift(z, j);
        if (!in_K[x]) continue;
        hits.push_back({l, j, x});
        ++count[x];
      }
  for (PointIndex x : K_prime)
    if (count[x] == 0)
      throw InvariantError("build_partition: point '" + sys.label(x) + "' is covered by no tower level");

  PartitionOfUnity out;
  out.m = m;
  out.k_prime = k_prime;
  out.K_prime = K_prime;
  std::vector<std::map<int, std::vector<std::pair<PointIndex, Rational>>>> raw(supports.supports.size());
  for (const auto& h : hits) raw[h.l][h.j].emplace_back(h.x, Rational(1, count[h.x]));
  for (auto& level : raw) {
    TowerLevel tl;
    for (auto& [j, entries] : level) tl.emplace(j, SparseFunction(std::move(entries)));
    out.levels.push_back(std::move(tl));
  }
  out.remainder.assign(sys.size(), Rational(1));
  for (PointIndex x : K_prime) out.remainder[x] = 0;
  return out;
}

TowerFamily folner_average(const FiniteDynamicalSystem& sys, const PartitionOfUnity& partition,
                           int k_prime) {
  if (k_prime < 0) throw PreconditionError("folner_average: k' must be nonnegative");
  TowerFamily out;
  out.m = partition.m;
  out.k_prime = k_prime;
  out.K_prime = partition.K_prime;
  const Rational weight(1, 2 * k_prime + 1);
  for (const auto& level : partition.levels) {
    // mu_j(x) gets p_{j+i}(shift_i x) / (2k'+1); scatter from each nonzero p value.
    std::map<int, std::map<PointIndex, Rational>> acc;
    for (const auto& [jp, p] : level)
      for (const auto& [y, v] : p.entries())
        for (int i = -k_prime; i <= k_prime; ++i) acc[jp - i][sys.shift(y, -i)] += v * weight;
    TowerLevel tl;
    for (auto& [j, values] : acc) {
      std::vector<std::pair<PointIndex, Rational>> entries(values.begin(), values.end());
      tl.emplace(j, SparseFunction(std::move(entries)));
    }
    out.levels.push_back(std::move(tl));
  }
  return out;
}

TowerFamily build_tower_family(const FiniteDynamicalSystem& sys, const PointSet& K, int d, int k,
                               int m, double epsilon) {
  if (k < 1) throw PreconditionError("build_tower_family: k must be at least 1");
  const std::int64_t kp = static_cast<std::int64_t>(k) * ceil_inverse(epsilon);
  if (kp > m) throw PreconditionError("build_tower_family: k' = k*ceil(1/eps) exceeds m");
  const int k_prime = static_cast<int>(kp);
  if (!tower_length_ok(d, k_prime, m))
    throw PreconditionError("build_tower_family: m=" + std::to_string(m) +
                            " is below (2d+3)k' - d/2 - 1 with k'=" + std::to_string(k_prime));

  PointSet K_prime;
  for (int i = -k_prime; i <= k_prime; ++i) K_prime = set_union(K_prime, image(K, sys.shift_permutation(i)));

  auto cert = greedy_markers(sys, m, K_prime, d);
  auto supports = tower_supports(sys, cert, d, k_prime, m);
  auto partition = build_partition(sys, supports, m, k_prime, K_prime);
  TowerFamily family = folner_average(sys, partition, k_prime);
  family.d = d;
  family.k = k;
  family.m = m;
  family.epsilon = epsilon;
  family.K = K;
  family.markers = std::move(cert);
  family.supports = std::move(supports);
  return family;
}

TowerVerification verify_tower(const FiniteDynamicalSystem& sys, const TowerFamily& family) {
  TowerVerification v;
  const int m = family.m;
  const int k = family.k;

  // (d): the values sum to one on K.
  std::vector<Rational> total(sys.size(), Rational(0));
  std::vector<double> total_f(sys.size(), 0.0);
  v.values_in_unit = true;
  for (const auto& level : family.levels)
    for (const auto& [j, mu] : level)
      for (const auto& [x, value] : mu.entries()) {
        total[x] += value;
        total_f[x] += to_double(value);
        if (value < Rational(0) || value > Rational(1)) v.values_in_unit = false;
      }
  v.max_sum_deviation = 0;
  for (PointIndex x : family.K) {
    Rational dev = total[x] - Rational(1);
    if (dev < Rational(0)) dev = -dev;
    v.max_sum_deviation = std::max(v.max_sum_deviation, dev);
    v.max_sum_deviation_float = std::max(v.max_sum_deviation_float, std::abs(total_f[x] - 1.0));
  }
  v.sum_ok = v.max_sum_deviation == Rational(0) && v.max_sum_deviation_float <= 1e-12;

  // (c) and disjointness within each level.
  v.supports_contained = true;
  v.supports_disjoint = true;
  for (std::size_t l = 0; l < family.levels.size(); ++l) {
    std::vector<bool> used(sys.size(), false);
    for (const auto& [j, mu] : family.levels[l]) {
      if (mu.empty()) continue;
      if (j < -m || j > m) {
        v.supports_contained = false;
        continue;
      }
      const PointSet allowed = l < family.supports.supports.size()
                                   ? image(family.supports.supports[l], sys.shift_permutation(j))
                                   : PointSet{};
      for (PointIndex x : mu.support()) {
        if (!contains(allowed, x)) v.supports_contained = false;
        if (used[x]) v.supports_disjoint = false;
        used[x] = true;
      }
    }
  }

  // (e): ||mu_j o shift_i - mu_{j-i}|| over all j and |i| <= k.
  v.max_step = 0;
  static const SparseFunction zero;
  for (const auto& level : family.levels) {
    auto get = [&](int j) -> const SparseFunction& {
      auto it = level.find(j);
      return it == level.end() ? zero : it->second;
    };
    for (int j = -m - k; j <= m + k; ++j)
      for (int i = -k; i <= k; ++i) {
        const SparseFunction& a = get(j);
        const SparseFunction& b = get(j - i);
        // (mu_j o shift_i)(x) = mu_j(shift_i x) is nonzero only at shift_{-i} of supp mu_j.
        PointSet pts = b.support();
        for (const auto& [y, _] : a.entries()) pts.push_back(sys.shift(y, -i));
        pts = make_point_set(std::move(pts));
        for (PointIndex x : pts) {
          Rational diff = a.at(sys.shift(x, i)) - b.at(x);
          if (diff < Rational(0)) diff = -diff;
          v.max_step = std::max(v.max_step, diff);
        }
      }
  }
  v.max_step_float = to_double(v.max_step);
  v.step_bound = Rational(2 * k, 2 * family.k_prime + 1);
  v.step_ok = v.max_step <= v.step_bound && to_double(v.step_bound) < family.epsilon;
  return v;
}

} // namespace nucdim
