#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nucdim/dynsys.hpp"

namespace nucdim {

// Group elements are opaque handles; only the oracles below interpret them.
using GroupElement = std::int64_t;

struct GroupOps {
  std::function<GroupElement(GroupElement, GroupElement)> compose; // compose(g, h) = g h
  std::function<GroupElement(GroupElement)> inverse;
  GroupElement identity = 0;

  static GroupOps integers();
};

// A group acting on the points of a system: each element maps to a permutation,
// with act(g h) = act(g) after act(h).
struct GroupAction {
  GroupOps ops;
  std::function<Permutation(GroupElement)> act;

  // Z acting by powers of the forward map.
  static GroupAction integers(const FiniteDynamicalSystem& sys);
};

// F, the translates g_0..g_d, and M = union of g_l F^{-1} F.
class GroupWindow {
public:
  // Throws InvariantError when the translates g_l F^{-1}F overlap or F is empty.
  static GroupWindow create(GroupOps ops, std::vector<GroupElement> F,
                            std::vector<GroupElement> translates);
  // F = [-m, m], g_l = (2m+1) + l(4m+1), so M = [1, (d+1)(4m+1)].
  static GroupWindow integer_marker_window(int m, int d);

  const GroupOps& ops() const { return ops_; }
  const std::vector<GroupElement>& F() const { return F_; }
  const std::vector<GroupElement>& translates() const { return translates_; }
  const std::vector<GroupElement>& difference_set() const { return FinvF_; } // F^{-1}F
  const std::vector<GroupElement>& M() const { return M_; }
  std::vector<GroupElement> M_inverse() const;
  // g_l F^{-1}F for one translate index.
  std::vector<GroupElement> colour_block(std::size_t l) const;
  int d() const { return static_cast<int>(translates_.size()) - 1; }

private:
  GroupOps ops_;
  std::vector<GroupElement> F_, translates_, FinvF_, M_;
};

struct TranslateOverlapWitness {
  PointIndex point; // lies in both shifted copies
  int i;
  int j;
};

struct MarkerCertificate {
  PointSet Z;
  int m = 0;
  int d = 0;
  PointSet K;
  bool translates_disjoint = false; // condition (a)
  std::optional<TranslateOverlapWitness> overlap_witness;
  bool covers_K = false; // condition (b)
  std::optional<PointIndex> uncovered_witness;
  bool valid() const { return translates_disjoint && covers_K; }
};

// Every (k+1)-element subset of the shifted images of E has empty intersection.
bool is_disjoint_family(const PointSet& E, std::span<const Permutation> shifts, std::size_t k);

// Points x whose translates {g x : g in M} are pairwise distinct.
PointSet free_locus(const FiniteDynamicalSystem& sys, std::span<const std::int64_t> M);
PointSet free_locus(const FiniteDynamicalSystem& sys, const GroupAction& action,
                    std::span<const GroupElement> M);

// Exhaustive check of conditions (a) and (b) for a candidate marker set.
MarkerCertificate verify_marker_certificate(const FiniteDynamicalSystem& sys, const PointSet& Z,
                                            int m, int d, const PointSet& K);

// Per-cycle evenly spaced markers for every cycle meeting K; d defaults to the declared dimension.
MarkerCertificate greedy_markers(const FiniteDynamicalSystem& sys, int m, const PointSet& K);
MarkerCertificate greedy_markers(const FiniteDynamicalSystem& sys, int m, const PointSet& K, int d);

// Closed ball of radius r around a set.
PointSet ball(const FiniteDynamicalSystem& sys, const PointSet& E, double r);

// Candidate radii: half of each distinct positive pairwise distance, descending.
std::vector<double> candidate_radii(const FiniteDynamicalSystem& sys);

double disjointness_margin(const FiniteDynamicalSystem& sys, const PointSet& E,
                           std::span<const Permutation> shifts, std::size_t k);

// Points of A at minimal positive inter-point distance from the complement of A.
PointSet finite_boundary(const FiniteDynamicalSystem& sys, const PointSet& A);

struct KeyLemmaResult {
  PointSet W;
  PointSet R;          // V minus the M-translates of U
  double rho = 0.0;    // the rho-ball around R stays (M^-1,1)-disjoint
  double delta = 0.0;  // ball radius used for the cover of R
  std::vector<PointIndex> centres;
  std::vector<std::size_t> colours; // translate index per centre
  bool boundary_disjoint = false;   // finite boundary of U is (M,d)-disjoint
};

KeyLemmaResult key_lemma_step(const FiniteDynamicalSystem& sys, const PointSet& U, const PointSet& V,
                              const GroupWindow& window, const GroupAction& action);

struct LocalMarkerResult {
  PointSet Z;
  GroupElement translated_by = 0;     // g_0; the window was left-translated by g_0^{-1}
  std::vector<PointSet> neighbourhoods; // U_0..U_s covering the translated K
  std::vector<KeyLemmaResult> steps;
  bool F_disjoint = false;  // g Z and h Z disjoint for g != h in F
  bool covers_K = false;    // K inside the union of g Z, g in M
};

LocalMarkerResult local_marker(const FiniteDynamicalSystem& sys, const PointSet& K,
                               const GroupWindow& window, const GroupAction& action);

// local_marker with the integer window, packaged like greedy_markers' output.
MarkerCertificate local_marker_certificate(const FiniteDynamicalSystem& sys, int m, const PointSet& K);

} // namespace nucdim
