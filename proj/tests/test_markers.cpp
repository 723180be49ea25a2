#include <gtest/gtest.h>

#include <algorithm>

#include "nucdim/error.hpp"
#include "nucdim/markers.hpp"
#include "oracles.hpp"

using namespace nucdim;

namespace {

FiniteDynamicalSystem cycles(std::vector<std::size_t> lengths, int d = 0) { return make_cycle_system(lengths, d); }

PointSet all_points(const FiniteDynamicalSystem& sys) {
  PointSet out(sys.size());
  for (PointIndex x = 0; x < sys.size(); ++x) out[x] = x;
  return out;
}

std::vector<Permutation> shifts(const FiniteDynamicalSystem& sys, std::vector<std::int64_t> powers) {
  std::vector<Permutation> out;
  for (auto p : powers) out.push_back(sys.shift_permutation(p));
  return out;
}

std::vector<std::size_t> positions(const FiniteDynamicalSystem& sys, const PointSet& Z, std::size_t cycle) {
  std::vector<std::size_t> out;
  for (PointIndex z : Z)
    if (sys.orbits().index[z].cycle == cycle) out.push_back(sys.orbits().index[z].position);
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

TEST(DisjointFamily, Examples) {
  const auto sys = cycles({10});
  EXPECT_TRUE(is_disjoint_family({0}, shifts(sys, {-1, 0, 1}), 1));
  EXPECT_FALSE(is_disjoint_family(all_points(sys), shifts(sys, {0, 3}), 1));
  EXPECT_FALSE(is_disjoint_family({0, 5}, shifts(sys, {0, 5}), 1));
}

TEST(DisjointFamily, HigherMultiplicity) {
  const auto sys = cycles({10});
  // Three shifts of {0, 1}: each point is hit at most twice.
  const auto s = shifts(sys, {0, 1, 2});
  EXPECT_FALSE(is_disjoint_family({0, 1}, s, 1));
  EXPECT_TRUE(is_disjoint_family({0, 1}, s, 2));
  EXPECT_TRUE(is_disjoint_family({}, s, 0));
}

TEST(FreeLocus, Examples) {
  const auto sys = cycles({3, 10});
  const std::vector<std::int64_t> m3{0, 1, 2};
  EXPECT_EQ(free_locus(sys, m3).size(), 13u);
  const std::vector<std::int64_t> m4{0, 1, 2, 3};
  const auto loc = free_locus(sys, m4);
  EXPECT_EQ(loc.size(), 10u);
  for (PointIndex x : loc) EXPECT_EQ(sys.cycle_length_of(x), 10u);
  const std::vector<std::int64_t> m0{0};
  EXPECT_EQ(free_locus(sys, m0).size(), 13u);
}

TEST(GroupWindow, IntegerMarkerWindow) {
  const auto w = GroupWindow::integer_marker_window(2, 1);
  EXPECT_EQ(w.F().size(), 5u);
  EXPECT_EQ(w.translates(), (std::vector<GroupElement>{5, 14}));
  std::vector<GroupElement> M = w.M();
  std::sort(M.begin(), M.end());
  ASSERT_EQ(M.size(), 18u);
  EXPECT_EQ(M.front(), 1);
  EXPECT_EQ(M.back(), 18);
  EXPECT_NE(std::find(w.difference_set().begin(), w.difference_set().end(), 0), w.difference_set().end());
}

TEST(GroupWindow, RejectsOverlappingTranslates) {
  EXPECT_THROW(GroupWindow::create(GroupOps::integers(), {-1, 0, 1}, {0, 2}), InvariantError);
  EXPECT_NO_THROW(GroupWindow::create(GroupOps::integers(), {0, 1}, {0, 5}));
}

TEST(GreedyMarkers, HundredCycle) {
  const auto sys = cycles({100});
  const auto cert = greedy_markers(sys, 2, all_points(sys), 0);
  std::vector<std::size_t> want;
  for (std::size_t p = 0; p < 100; p += 5) want.push_back(p);
  EXPECT_EQ(positions(sys, cert.Z, 0), want);
  EXPECT_TRUE(cert.translates_disjoint);
  EXPECT_TRUE(cert.covers_K);
  const auto brute = oracle::marker_check(sys, cert.Z, 2, 0, all_points(sys));
  EXPECT_TRUE(brute.disjoint);
  EXPECT_TRUE(brute.covers);
}

TEST(GreedyMarkers, TwelveCycleSplitsRemainder) {
  const auto sys = cycles({12});
  const auto cert = greedy_markers(sys, 2, all_points(sys), 0);
  EXPECT_EQ(positions(sys, cert.Z, 0), (std::vector<std::size_t>{0, 6}));
  EXPECT_TRUE(cert.valid());
}

TEST(GreedyMarkers, RejectsShortCycle) {
  const auto sys = cycles({9});
  try {
    greedy_markers(sys, 2, all_points(sys), 0);
    FAIL() << "expected a PreconditionError";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("(d+1)(4m+1)=9"), std::string::npos) << e.what();
  }
}

TEST(GreedyMarkers, OnlyCyclesMeetingK) {
  const auto sys = cycles({3, 40});
  const PointSet K{5};
  const auto cert = greedy_markers(sys, 2, K, 0);
  for (PointIndex z : cert.Z) EXPECT_EQ(sys.cycle_length_of(z), 40u);
  EXPECT_TRUE(cert.valid());
}

TEST(MarkerCertificate, FlagsAgreeWithBruteForceOnArbitrarySets) {
  oracle::Rng rng(31);
  std::bernoulli_distribution coin(0.15);
  for (int trial = 0; trial < 200; ++trial) {
    const auto sys = oracle::random_cycles(rng, 2, 10, 40, trial % 2);
    PointSet Z;
    for (PointIndex x = 0; x < sys.size(); ++x)
      if (coin(rng)) Z.push_back(x);
    const int m = 1 + trial % 2, d = trial % 2;
    const auto cert = verify_marker_certificate(sys, Z, m, d, all_points(sys));
    const auto brute = oracle::marker_check(sys, Z, m, d, all_points(sys));
    EXPECT_EQ(cert.translates_disjoint, brute.disjoint);
    EXPECT_EQ(cert.covers_K, brute.covers);
    EXPECT_EQ(cert.overlap_witness.has_value(), !brute.disjoint);
    EXPECT_EQ(cert.uncovered_witness.has_value(), !brute.covers);
  }
}

TEST(DisjointnessMargin, Examples) {
  const auto sys = cycles({10});
  const auto s = shifts(sys, {-1, 0, 1});
  EXPECT_DOUBLE_EQ(disjointness_margin(sys, {0}, s, 1), 0.5);
  const auto radii = candidate_radii(sys);
  EXPECT_DOUBLE_EQ(disjointness_margin(sys, {}, s, 1), radii.front());
  EXPECT_THROW(disjointness_margin(sys, {0, 1}, s, 1), PreconditionError);
}

TEST(DisjointnessMargin, BallAtMarginStaysDisjoint) {
  oracle::Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const auto sys = oracle::random_cycles(rng, 2, 8, 20, 0);
    const auto s = shifts(sys, {-1, 0, 1});
    const PointSet E{static_cast<PointIndex>(trial % sys.size())};
    const double r = disjointness_margin(sys, E, s, 1);
    EXPECT_TRUE(is_disjoint_family(ball(sys, E, r), s, 1));
    for (double bigger : candidate_radii(sys))
      if (bigger > r) {
        EXPECT_FALSE(is_disjoint_family(ball(sys, E, bigger), s, 1)) << bigger;
      }
  }
}

TEST(FiniteBoundary, PointsNextToComplement) {
  const auto sys = cycles({10});
  const PointSet A{2, 3, 4, 5};
  EXPECT_EQ(finite_boundary(sys, A), (PointSet{2, 5}));
  EXPECT_TRUE(finite_boundary(sys, all_points(sys)).empty());
}

TEST(KeyLemmaStep, SixtyCycleTwoColours) {
  const auto sys = cycles({60}, 1);
  const auto window = GroupWindow::create(GroupOps::integers(), {0, 1}, {0, 5});
  const auto action = GroupAction::integers(sys);
  PointSet V;
  for (PointIndex x = 0; x < 60; x += 12) V.push_back(x);
  const auto res = key_lemma_step(sys, {}, V, window, action);
  EXPECT_TRUE(is_disjoint_family(res.W, shifts(sys, {0, 1}), 1));
  PointSet reach;
  for (GroupElement g : window.M()) reach = set_union(reach, image(res.W, sys.shift_permutation(g)));
  EXPECT_TRUE(set_difference(V, reach).empty());
}

TEST(KeyLemmaStep, AlreadyCoveredLeavesUUnchanged) {
  const auto sys = cycles({60}, 1);
  const auto window = GroupWindow::create(GroupOps::integers(), {0, 1}, {0, 5});
  const auto action = GroupAction::integers(sys);
  const PointSet U{10};
  const PointSet V{sys.shift(10, 1)};
  const auto res = key_lemma_step(sys, U, V, window, action);
  EXPECT_EQ(res.W, U);
  EXPECT_TRUE(res.R.empty());
}

TEST(KeyLemmaStep, RejectsNonDisjointU) {
  const auto sys = cycles({60}, 1);
  const auto window = GroupWindow::create(GroupOps::integers(), {0, 1}, {0, 5});
  EXPECT_THROW(key_lemma_step(sys, {3, 4}, {20}, window, GroupAction::integers(sys)), PreconditionError);
}

TEST(LocalMarker, SixtyCycleCrossValidatesGreedy) {
  const auto sys = cycles({60}, 0);
  const auto K = all_points(sys);
  const auto local = local_marker_certificate(sys, 2, K);
  const auto greedy = greedy_markers(sys, 2, K, 0);
  EXPECT_TRUE(local.valid());
  EXPECT_TRUE(greedy.valid());
  for (const auto* c : {&local, &greedy}) {
    const auto brute = oracle::marker_check(sys, c->Z, 2, 0, K);
    EXPECT_TRUE(brute.disjoint);
    EXPECT_TRUE(brute.covers);
  }
}

TEST(LocalMarker, EmptyAndSingletonK) {
  const auto sys = cycles({60}, 0);
  const auto window = GroupWindow::integer_marker_window(2, 0);
  const auto action = GroupAction::integers(sys);
  EXPECT_TRUE(local_marker(sys, {}, window, action).Z.empty());

  const PointSet K{17};
  const auto res = local_marker(sys, K, window, action);
  ASSERT_EQ(res.Z.size(), 1u);
  bool found = false;
  for (GroupElement g : window.M()) found = found || sys.shift(res.Z[0], g) == 17;
  EXPECT_TRUE(found);
  EXPECT_TRUE(res.F_disjoint);
  EXPECT_TRUE(res.covers_K);
}

TEST(LocalMarker, RotationSystems) {
  for (std::size_t q : {23u, 31u, 48u}) {
    const auto sys = make_rotation_system(q, 1, 0);
    const auto cert = local_marker_certificate(sys, 1, all_points(sys));
    const auto brute = oracle::marker_check(sys, cert.Z, 1, 0, all_points(sys));
    EXPECT_TRUE(brute.disjoint) << q;
    EXPECT_TRUE(brute.covers) << q;
  }
}
