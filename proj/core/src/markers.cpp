#include "nucdim/markers.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "nucdim/error.hpp"

namespace nucdim {

namespace {

std::vector<GroupElement> sorted_unique(std::vector<GroupElement> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Lazily materialised permutations for one action.
class PermutationCache {
public:
  explicit PermutationCache(const GroupAction& action) : action_(action) {}
  const Permutation& operator()(GroupElement g) {
    auto it = cache_.find(g);
    if (it == cache_.end()) it = cache_.emplace(g, action_.act(g)).first;
    return it->second;
  }
  std::vector<Permutation> all(std::span<const GroupElement> elements) {
    std::vector<Permutation> out;
    out.reserve(elements.size());
    for (GroupElement g : elements) out.push_back((*this)(g));
    return out;
  }

private:
  const GroupAction& action_;
  std::map<GroupElement, Permutation> cache_;
};

std::string describe(const FiniteDynamicalSystem& sys, PointIndex x) { return "'" + sys.label(x) + "'"; }

} // namespace

GroupOps GroupOps::integers() {
  return GroupOps{[](GroupElement a, GroupElement b) { return a + b; },
                  [](GroupElement a) { return -a; }, 0};
}

GroupAction GroupAction::integers(const FiniteDynamicalSystem& sys) {
  return GroupAction{GroupOps::integers(),
                     [sys](GroupElement n) { return sys.shift_permutation(n); }};
}

GroupWindow GroupWindow::create(GroupOps ops, std::vector<GroupElement> F,
                                std::vector<GroupElement> translates) {
  if (F.empty()) throw InvariantError("group window: F must be nonempty");
  if (translates.empty()) throw InvariantError("group window: at least one translate is required");
  GroupWindow w;
  w.ops_ = std::move(ops);
  w.F_ = sorted_unique(std::move(F));
  w.translates_ = std::move(translates);
  std::vector<GroupElement> diff;
  for (GroupElement a : w.F_)
    for (GroupElement b : w.F_) diff.push_back(w.ops_.compose(w.ops_.inverse(a), b));
  w.FinvF_ = sorted_unique(std::move(diff));
  if (!std::binary_search(w.FinvF_.begin(), w.FinvF_.end(), w.ops_.identity))
    throw InvariantError("group window: identity is missing from F^-1 F");

  std::map<GroupElement, std::size_t> owner;
  std::vector<GroupElement> M;
  for (std::size_t l = 0; l < w.translates_.size(); ++l) {
    for (GroupElement h : w.colour_block(l)) {
      auto [it, fresh] = owner.emplace(h, l);
      if (!fresh && it->second != l)
        throw InvariantError("group window: translates " + std::to_string(it->second) + " and " +
                             std::to_string(l) + " of F^-1 F overlap");
      M.push_back(h);
    }
  }
  w.M_ = sorted_unique(std::move(M));
  return w;
}

GroupWindow GroupWindow::integer_marker_window(int m, int d) {
  if (m < 1) throw PreconditionError("marker window: m must be at least 1");
  if (d < 0) throw PreconditionError("marker window: d must be nonnegative");
  std::vector<GroupElement> F, g;
  for (int i = -m; i <= m; ++i) F.push_back(i);
  for (int l = 0; l <= d; ++l) g.push_back((2 * m + 1) + static_cast<GroupElement>(l) * (4 * m + 1));
  return create(GroupOps::integers(), std::move(F), std::move(g));
}

std::vector<GroupElement> GroupWindow::M_inverse() const {
  std::vector<GroupElement> out;
  for (GroupElement g : M_) out.push_back(ops_.inverse(g));
  return sorted_unique(std::move(out));
}

std::vector<GroupElement> GroupWindow::colour_block(std::size_t l) const {
  std::vector<GroupElement> out;
  for (GroupElement h : FinvF_) out.push_back(ops_.compose(translates_.at(l), h));
  return sorted_unique(std::move(out));
}

bool is_disjoint_family(const PointSet& E, std::span<const Permutation> shifts, std::size_t k) {
  if (shifts.size() <= k || E.empty()) return true;
  std::map<PointIndex, std::size_t> hits;
  for (const auto& s : shifts)
    for (PointIndex x : E)
      if (++hits[s.at(x)] > k) return false;
  return true;
}

PointSet free_locus(const FiniteDynamicalSystem& sys, std::span<const std::int64_t> M) {
  return free_locus(sys, GroupAction::integers(sys), M);
}

PointSet free_locus(const FiniteDynamicalSystem& sys, const GroupAction& action,
                    std::span<const GroupElement> M) {
  PermutationCache perms(action);
  const auto shifts = perms.all(M);
  PointSet out;
  for (PointIndex x = 0; x < sys.size(); ++x) {
    std::set<PointIndex> images;
    for (const auto& s : shifts) images.insert(s[x]);
    if (images.size() == shifts.size()) out.push_back(x);
  }
  return out;
}

MarkerCertificate verify_marker_certificate(const FiniteDynamicalSystem& sys, const PointSet& Z,
                                            int m, int d, const PointSet& K) {
  MarkerCertificate cert;
  cert.Z = Z;
  cert.m = m;
  cert.d = d;
  cert.K = K;

  // (a): the 2m+1 shifted copies of Z are pairwise disjoint.
  cert.translates_disjoint = true;
  std::vector<int> owner(sys.size(), 0);
  std::vector<bool> hit(sys.size(), false);
  for (PointIndex z : Z) {
    for (int i = -m; i <= m && cert.translates_disjoint; ++i) {
      const PointIndex y = sys.shift(z, i);
      if (hit[y] && owner[y] != i) {
        cert.translates_disjoint = false;
        cert.overlap_witness = TranslateOverlapWitness{y, std::min(owner[y], i), std::max(owner[y], i)};
      }
      // The same point reached twice with the same shift only happens from the same z.
      hit[y] = true;
      owner[y] = i;
    }
    if (!cert.translates_disjoint) break;
  }

  // (b): every point of K lies in some forward shift of Z by 1..(d+1)(4m+1).
  cert.covers_K = true;
  const std::int64_t reach = static_cast<std::int64_t>(d + 1) * (4 * m + 1);
  for (PointIndex x : K) {
    bool covered = false;
    for (std::int64_t i = 1; i <= reach && !covered; ++i) covered = contains(Z, sys.shift(x, -i));
    if (!covered) {
      cert.covers_K = false;
      cert.uncovered_witness = x;
      break;
    }
  }
  return cert;
}

MarkerCertificate greedy_markers(const FiniteDynamicalSystem& sys, int m, const PointSet& K) {
  return greedy_markers(sys, m, K, sys.declared_dim());
}

MarkerCertificate greedy_markers(const FiniteDynamicalSystem& sys, int m, const PointSet& K, int d) {
  if (m < 1) throw PreconditionError("greedy_markers: m must be at least 1");
  if (d < 0) throw PreconditionError("greedy_markers: d must be nonnegative");
  const std::size_t bound = static_cast<std::size_t>(d + 1) * static_cast<std::size_t>(4 * m + 1);
  const auto& orb = sys.orbits();

  std::set<std::size_t> cycles;
  for (PointIndex x : K) cycles.insert(orb.index.at(x).cycle);

  std::vector<PointIndex> Z;
  for (std::size_t c : cycles) {
    const auto& cyc = orb.cycles[c];
    const std::size_t L = cyc.length();
    if (L <= bound)
      throw PreconditionError("greedy_markers: cycle at " + describe(sys, cyc.base) + " has length " +
                              std::to_string(L) + "; L must exceed (d+1)(4m+1)=" + std::to_string(bound));
    const std::size_t base_gap = static_cast<std::size_t>(2 * m + 1);
    const std::size_t q = L / base_gap;
    const std::size_t r = L - q * base_gap;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < q; ++i) {
      Z.push_back(cyc.points[pos]);
      pos += base_gap + r / q + (i < r % q ? 1 : 0);
    }
  }
  auto cert = verify_marker_certificate(sys, make_point_set(std::move(Z)), m, d, K);
  if (!cert.valid()) throw InvariantError("greedy_markers: produced an invalid certificate");
  return cert;
}

PointSet ball(const FiniteDynamicalSystem& sys, const PointSet& E, double r) {
  const auto& metric = sys.metric();
  PointSet out;
  for (PointIndex y = 0; y < sys.size(); ++y)
    for (PointIndex x : E)
      if (metric(x, y) <= r) {
        out.push_back(y);
        break;
      }
  return out;
}

std::vector<double> candidate_radii(const FiniteDynamicalSystem& sys) {
  const auto& metric = sys.metric();
  std::vector<double> out;
  for (PointIndex a = 0; a < sys.size(); ++a)
    for (PointIndex b = a + 1; b < sys.size(); ++b) out.push_back(metric(a, b) / 2.0);
  std::sort(out.begin(), out.end(), std::greater<>());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

double margin_from(const FiniteDynamicalSystem& sys, const PointSet& E,
                   std::span<const Permutation> shifts, std::size_t k,
                   const std::vector<double>& candidates) {
  for (double r : candidates)
    if (is_disjoint_family(ball(sys, E, r), shifts, k)) return r;
  return 0.0;
}

} // namespace

double disjointness_margin(const FiniteDynamicalSystem& sys, const PointSet& E,
                           std::span<const Permutation> shifts, std::size_t k) {
  if (!sys.has_metric()) throw PreconditionError("disjointness_margin: system carries no metric");
  if (!is_disjoint_family(E, shifts, k))
    throw PreconditionError("disjointness_margin: the set is not disjoint to begin with");
  return margin_from(sys, E, shifts, k, candidate_radii(sys));
}

PointSet finite_boundary(const FiniteDynamicalSystem& sys, const PointSet& A) {
  const auto& metric = sys.metric();
  double min_positive = 0.0;
  for (PointIndex a = 0; a < sys.size(); ++a)
    for (PointIndex b = a + 1; b < sys.size(); ++b)
      if (min_positive == 0.0 || metric(a, b) < min_positive) min_positive = metric(a, b);
  PointSet out;
  if (A.size() == sys.size()) return out;
  for (PointIndex x : A) {
    double to_complement = -1.0;
    for (PointIndex y = 0; y < sys.size(); ++y)
      if (!contains(A, y) && (to_complement < 0.0 || metric(x, y) < to_complement)) to_complement = metric(x, y);
    if (to_complement == min_positive) out.push_back(x);
  }
  return out;
}

KeyLemmaResult key_lemma_step(const FiniteDynamicalSystem& sys, const PointSet& U, const PointSet& V,
                              const GroupWindow& window, const GroupAction& action) {
  if (!sys.has_metric()) throw PreconditionError("key_lemma_step: system carries no metric");
  PermutationCache perms(action);
  const auto& ops = window.ops();
  const std::vector<GroupElement> M = window.M();
  const std::vector<GroupElement> Minv = window.M_inverse();
  const auto F_shifts = perms.all(window.F());
  const auto M_shifts = perms.all(M);
  const auto Minv_shifts = perms.all(Minv);
  const std::size_t d = static_cast<std::size_t>(window.d());

  if (!is_disjoint_family(U, F_shifts, 1))
    throw PreconditionError("key_lemma_step: U is not (F,1)-disjoint");
  if (!is_disjoint_family(V, Minv_shifts, 1))
    throw PreconditionError("key_lemma_step: V is not (M^-1,1)-disjoint");

  KeyLemmaResult out;
  out.boundary_disjoint = is_disjoint_family(finite_boundary(sys, U), M_shifts, d);

  // R = V minus the M-translates of U.
  PointSet covered;
  for (const auto& s : M_shifts) covered = set_union(covered, image(U, s));
  out.R = set_difference(V, covered);
  if (out.R.empty()) {
    out.W = U;
    return out;
  }

  const auto radii = candidate_radii(sys);
  out.rho = margin_from(sys, out.R, Minv_shifts, 1, radii);

  // Translates of U, one per g in M, for the counting condition.
  std::vector<PointSet> U_translates;
  for (const auto& s : M_shifts) U_translates.push_back(image(U, s));
  auto hitting = [&](const PointSet& B) {
    std::vector<std::size_t> idx;
    for (std::size_t g = 0; g < M.size(); ++g)
      if (!set_intersection(U_translates[g], B).empty()) idx.push_back(g);
    return idx;
  };

  // Largest delta <= rho for which every delta-ball around R meets at most d translates of U.
  std::optional<double> delta;
  PointIndex violator = out.R.front();
  for (double r : radii) {
    if (r > out.rho) continue;
    bool ok = true;
    for (PointIndex x : out.R) {
      if (hitting(ball(sys, {x}, r)).size() > d) {
        ok = false;
        violator = x;
        break;
      }
    }
    if (ok) {
      delta = r;
      break;
    }
  }
  if (!delta)
    throw PreconditionError("key_lemma_step: no admissible ball radius at " + describe(sys, violator));
  out.delta = *delta;

  // Greedy cover of R by delta-balls, centres taken in index order.
  PointSet uncovered = out.R;
  std::vector<PointSet> balls;
  while (!uncovered.empty()) {
    const PointIndex z = uncovered.front();
    PointSet B = ball(sys, {z}, out.delta);
    uncovered = set_difference(uncovered, B);
    out.centres.push_back(z);
    balls.push_back(std::move(B));
  }

  // Colour each ball by a translate block that misses it entirely.
  std::vector<std::vector<GroupElement>> blocks;
  for (std::size_t l = 0; l <= d; ++l) blocks.push_back(window.colour_block(l));
  PointSet W = U;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    std::set<GroupElement> blocked;
    for (std::size_t g : hitting(balls[i])) blocked.insert(M[g]);
    std::optional<std::size_t> colour;
    for (std::size_t l = 0; l <= d && !colour; ++l) {
      const bool free = std::none_of(blocks[l].begin(), blocks[l].end(),
                                     [&](GroupElement h) { return blocked.count(h) > 0; });
      if (free) colour = l;
    }
    if (!colour)
      throw PreconditionError("key_lemma_step: no free colour for the ball at " +
                              describe(sys, out.centres[i]) + "; U is not (M,d)-disjoint near it");
    out.colours.push_back(*colour);
    const auto& back = perms(ops.inverse(window.translates()[*colour]));
    W = set_union(W, image(balls[i], back));
  }
  out.W = std::move(W);

  if (!is_disjoint_family(out.W, F_shifts, 1))
    throw InvariantError("key_lemma_step: constructed W is not (F,1)-disjoint");
  PointSet reach;
  for (const auto& s : M_shifts) reach = set_union(reach, image(out.W, s));
  if (!set_difference(V, reach).empty())
    throw InvariantError("key_lemma_step: constructed W does not cover V");
  return out;
}

LocalMarkerResult local_marker(const FiniteDynamicalSystem& sys, const PointSet& K,
                               const GroupWindow& window, const GroupAction& action) {
  if (!sys.has_metric()) throw PreconditionError("local_marker: system carries no metric");
  const auto& ops = window.ops();
  LocalMarkerResult out;
  out.translated_by = window.translates().front();

  // Left-translate the window so that its first translate is the identity; the cover of
  // K then comes from running on the correspondingly translated K.
  const GroupElement g0_inv = ops.inverse(out.translated_by);
  std::vector<GroupElement> shifted;
  for (GroupElement g : window.translates()) shifted.push_back(ops.compose(g0_inv, g));
  const GroupWindow local = GroupWindow::create(ops, window.F(), std::move(shifted));

  PermutationCache perms(action);
  const PointSet K_local = image(K, perms(g0_inv));
  const auto Minv = local.M_inverse();
  const auto Minv_shifts = perms.all(Minv);
  const PointSet free_points = free_locus(sys, action, Minv);
  for (PointIndex x : K_local)
    if (!contains(free_points, x))
      throw PreconditionError("local_marker: translates of " + describe(sys, x) + " under M^-1 are not distinct");

  // Neighbourhoods in label order: a margin ball around each still-uncovered point.
  std::vector<PointIndex> order(K_local.begin(), K_local.end());
  std::sort(order.begin(), order.end(),
            [&](PointIndex a, PointIndex b) { return sys.label(a) < sys.label(b); });
  const auto radii = candidate_radii(sys);
  PointSet covered;
  for (PointIndex x : order) {
    if (contains(covered, x)) continue;
    const double r = margin_from(sys, {x}, Minv_shifts, 1, radii);
    PointSet Ux = ball(sys, {x}, r);
    covered = set_union(covered, Ux);
    out.neighbourhoods.push_back(std::move(Ux));
  }

  PointSet W;
  if (!out.neighbourhoods.empty()) W = out.neighbourhoods.front();
  for (std::size_t i = 1; i < out.neighbourhoods.size(); ++i) {
    out.steps.push_back(key_lemma_step(sys, W, out.neighbourhoods[i], local, action));
    W = out.steps.back().W;
  }
  out.Z = std::move(W);

  out.F_disjoint = is_disjoint_family(out.Z, perms.all(window.F()), 1);
  PointSet reach;
  for (GroupElement g : window.M()) reach = set_union(reach, image(out.Z, perms(g)));
  out.covers_K = set_difference(K, reach).empty();
  return out;
}

MarkerCertificate local_marker_certificate(const FiniteDynamicalSystem& sys, int m, const PointSet& K) {
  const int d = sys.declared_dim();
  const auto window = GroupWindow::integer_marker_window(m, d);
  const auto result = local_marker(sys, K, window, GroupAction::integers(sys));
  return verify_marker_certificate(sys, result.Z, m, d, K);
}

} // namespace nucdim
