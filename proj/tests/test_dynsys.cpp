#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

#include "nucdim/dynsys.hpp"
#include "nucdim/error.hpp"
#include "oracles.hpp"

using namespace nucdim;

namespace {

std::vector<std::size_t> lengths_of(const OrbitDecomposition& o) {
  std::vector<std::size_t> out;
  for (const auto& c : o.cycles) out.push_back(c.length());
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

TEST(LoadSystem, ThreeCycle) {
  const auto sys = load_system(R"({"points": ["a", "b", "c"], "map": {"a": "b", "b": "c", "c": "a"}, "dimension": 0})");
  EXPECT_EQ(sys.size(), 3u);
  EXPECT_EQ(lengths_of(sys.orbits()), (std::vector<std::size_t>{3}));
  EXPECT_EQ(sys.forward(sys.index_of("c")), sys.index_of("a"));
  EXPECT_EQ(sys.backward(sys.index_of("a")), sys.index_of("c"));
}

TEST(LoadSystem, RejectsNonInjectiveMap) {
  try {
    load_system(R"({"points": ["a", "b", "c"], "map": {"a": "b", "b": "b", "c": "a"}, "dimension": 0})");
    FAIL() << "expected an InvariantError";
  } catch (const InvariantError& e) {
    EXPECT_NE(std::string(e.what()).find("not injective"), std::string::npos) << e.what();
  }
}

TEST(LoadSystem, RejectsMalformedDocuments) {
  EXPECT_THROW(load_system("not json"), ParseError);
  EXPECT_THROW(load_system(R"({"points": ["a"], "map": {"a": "a"}})"), ParseError);
  EXPECT_THROW(load_system(R"({"points": ["a"], "map": {"a": "b"}, "dimension": 0})"), ParseError);
  EXPECT_THROW(load_system(R"({"points": ["a", "a"], "map": {"a": "a"}, "dimension": 0})"), ParseError);
  EXPECT_THROW(load_system(R"({"points": ["a"], "map": {"a": "a"}, "dimension": 0, "extra": 1})"), ParseError);
}

TEST(LoadSystem, ArcMetricOnTenCyclePassesTriangleAudit) {
  const std::size_t L = 10;
  nlohmann::json doc;
  std::vector<std::string> pts;
  for (std::size_t i = 0; i < L; ++i) pts.push_back("x" + std::to_string(i));
  doc["points"] = pts;
  for (std::size_t i = 0; i < L; ++i) doc["map"][pts[i]] = pts[(i + 1) % L];
  doc["metric"] = nlohmann::json::array();
  for (std::size_t a = 0; a < L; ++a)
    for (std::size_t b = a + 1; b < L; ++b) doc["metric"].push_back({pts[a], pts[b], double(std::min(b - a, L - b + a))});
  doc["dimension"] = 1;
  const auto sys = load_system(doc.dump());
  ASSERT_TRUE(sys.has_metric());
  for (PointIndex a = 0; a < L; ++a)
    for (PointIndex b = 0; b < L; ++b)
      for (PointIndex c = 0; c < L; ++c) EXPECT_LE(sys.distance(a, c), sys.distance(a, b) + sys.distance(b, c) + 1e-12);
}

TEST(LoadSystem, RejectsBrokenTriangleInequality) {
  const char* doc = R"({"points": ["a", "b", "c"], "map": {"a": "b", "b": "c", "c": "a"},
    "metric": [["a", "b", 1], ["b", "c", 1], ["a", "c", 5]], "dimension": 0})";
  EXPECT_THROW(load_system(doc), InvariantError);
}

TEST(LoadSystem, RoundTripsThroughJson) {
  const std::vector<std::size_t> lengths{2, 5};
  const auto sys = make_cycle_system(lengths, 1);
  const auto again = load_system(system_to_json(sys));
  ASSERT_EQ(again.size(), sys.size());
  for (PointIndex x = 0; x < sys.size(); ++x) {
    EXPECT_EQ(again.label(x), sys.label(x));
    EXPECT_EQ(again.forward(x), sys.forward(x));
    for (PointIndex y = 0; y < sys.size(); ++y) EXPECT_DOUBLE_EQ(again.distance(x, y), sys.distance(x, y));
  }
  EXPECT_EQ(again.declared_dim(), 1);
}

TEST(MakeCycleSystem, Examples) {
  const std::vector<std::size_t> a{3, 10};
  const auto s1 = make_cycle_system(a, 0);
  EXPECT_EQ(s1.size(), 13u);
  EXPECT_EQ(lengths_of(s1.orbits()), (std::vector<std::size_t>{3, 10}));

  const std::vector<std::size_t> b{1};
  const auto s2 = make_cycle_system(b, 0);
  EXPECT_EQ(s2.size(), 1u);
  EXPECT_EQ(s2.forward(0), 0u);

  const std::vector<std::size_t> c{5, 5};
  const auto s3 = make_cycle_system(c, 1);
  EXPECT_EQ(oracle::walk_cycle_lengths(s3), (std::vector<std::size_t>{5, 5}));
  EXPECT_EQ(lengths_of(orbit_decomposition(s3)), (std::vector<std::size_t>{5, 5}));

  const std::vector<std::size_t> bad{3, 0};
  EXPECT_THROW(make_cycle_system(bad, 0), PreconditionError);
}

TEST(MakeRotationSystem, Examples) {
  EXPECT_EQ(oracle::walk_cycle_lengths(make_rotation_system(12, 5)), (std::vector<std::size_t>{12}));
  EXPECT_EQ(oracle::walk_cycle_lengths(make_rotation_system(12, 4)), (std::vector<std::size_t>(4, 3)));
  EXPECT_EQ(lengths_of(make_rotation_system(12, 4).orbits()), (std::vector<std::size_t>(4, 3)));
  const auto fixed = make_rotation_system(1, 0);
  EXPECT_EQ(fixed.size(), 1u);
  EXPECT_EQ(fixed.forward(0), 0u);
  EXPECT_EQ(make_rotation_system(12, -7).forward(0), 5u);
}

TEST(OrbitDecomposition, MatchesWalkOnRandomSystems) {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const auto sys = oracle::random_cycles(rng, 1 + trial % 5, 1, 30, 0);
    const auto& orb = sys.orbits();
    EXPECT_EQ(lengths_of(orb), oracle::walk_cycle_lengths(sys));
    std::vector<int> seen(sys.size(), 0);
    for (std::size_t c = 0; c < orb.cycles.size(); ++c) {
      const auto& cyc = orb.cycles[c];
      for (std::size_t i = 0; i < cyc.length(); ++i) {
        ++seen[cyc.points[i]];
        EXPECT_EQ(sys.forward(cyc.points[i]), cyc.points[(i + 1) % cyc.length()]);
        EXPECT_EQ(orb.index[cyc.points[i]].cycle, c);
        EXPECT_EQ(orb.index[cyc.points[i]].position, i);
      }
      EXPECT_EQ(cyc.base, *std::min_element(cyc.points.begin(), cyc.points.end()));
    }
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
  }
}

TEST(Shift, AgreesWithIteratedSteps) {
  oracle::Rng rng(5);
  const auto sys = oracle::random_cycles(rng, 4, 1, 17, 0);
  for (PointIndex x = 0; x < sys.size(); ++x)
    for (std::int64_t n = -40; n <= 40; n += 3) EXPECT_EQ(sys.shift(x, n), oracle::iterate(sys, x, n));
}

TEST(InvariantSplit, Examples) {
  const std::vector<std::size_t> a{3, 10};
  const auto sys = make_cycle_system(a, 0);
  auto s = invariant_split(sys, 5);
  EXPECT_EQ(s.short_part.size(), 3u);
  EXPECT_EQ(s.long_part.size(), 10u);
  s = invariant_split(sys, 10);
  EXPECT_TRUE(s.long_part.empty());
  EXPECT_EQ(s.short_part.size(), 13u);

  const std::vector<std::size_t> b{2, 2, 7, 100};
  const auto sys2 = make_cycle_system(b, 0);
  s = invariant_split(sys2, 25);
  EXPECT_EQ(s.short_cycles.size(), 3u);
  EXPECT_EQ(s.long_cycles.size(), 1u);
  EXPECT_EQ(s.long_part.size(), 100u);
  EXPECT_EQ(s.short_part.size(), 11u);
  EXPECT_THROW(invariant_split(sys2, 0), PreconditionError);
}

TEST(InvariantSplit, PartsAreInvariantAndFiltered) {
  oracle::Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto sys = oracle::random_cycles(rng, 5, 1, 40, 0);
    const std::size_t N = 1 + trial * 2;
    const auto s = invariant_split(sys, N);
    EXPECT_EQ(s.short_part.size() + s.long_part.size(), sys.size());
    EXPECT_EQ(image(s.short_part, sys.shift_permutation(1)), s.short_part);
    EXPECT_EQ(image(s.long_part, sys.shift_permutation(1)), s.long_part);
    for (PointIndex x : s.short_part) EXPECT_LE(sys.cycle_length_of(x), N);
    for (PointIndex x : s.long_part) EXPECT_GT(sys.cycle_length_of(x), N);
  }
}

TEST(QuotientReport, Examples) {
  const std::vector<std::size_t> a{2, 5};
  const auto q = quotient_report(make_cycle_system(a, 0));
  ASSERT_EQ(q.fibers.size(), 2u);
  EXPECT_EQ(q.fibers[0].length, 2u);
  EXPECT_EQ(q.fibers[1].length, 5u);
  EXPECT_EQ(q.fibers[0].fiber, "M_2 over the circle");
  EXPECT_EQ(q.fibers[1].stabilizer, "5Z");

  const std::vector<std::size_t> one{1};
  const auto fixed = quotient_report(make_cycle_system(one, 0));
  EXPECT_EQ(fixed.bound_plus_one, 2);
}

TEST(QuotientReport, EmptyComplementSystem) {
  const auto sys = load_system(R"({"points": [], "map": {}, "dimension": 0})");
  const auto split = invariant_split(sys, 3);
  EXPECT_TRUE(split.short_part.empty());
  EXPECT_TRUE(split.long_part.empty());
  EXPECT_TRUE(quotient_report(sys).fibers.empty());
}

TEST(RestrictSystem, KeepsLabelsAndDynamics) {
  const std::vector<std::size_t> a{3, 4, 6};
  const auto sys = make_cycle_system(a, 2);
  const std::vector<std::size_t> keep{0, 2};
  const auto sub = restrict_system(sys, cycle_points(sys, keep));
  EXPECT_EQ(sub.size(), 9u);
  EXPECT_EQ(sub.declared_dim(), 2);
  for (PointIndex x = 0; x < sub.size(); ++x) {
    const PointIndex host = sys.index_of(sub.label(x));
    EXPECT_EQ(sub.label(sub.forward(x)), sys.label(sys.forward(host)));
  }
  const PointSet not_invariant{0};
  EXPECT_THROW(restrict_system(sys, not_invariant), PreconditionError);
}
