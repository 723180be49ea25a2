#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nucdim/error.hpp"
#include "nucdim/towers.hpp"
#include "oracles.hpp"

using namespace nucdim;

namespace {

PointSet all_points(const FiniteDynamicalSystem& sys) {
  PointSet out(sys.size());
  for (PointIndex x = 0; x < sys.size(); ++x) out[x] = x;
  return out;
}

Rational abs_r(Rational r) { return r < Rational(0) ? -r : r; }

// max over l, j, |i| <= k, x of |mu_j(forward^i x) - mu_{j-i}(x)|, with every point visited.
Rational brute_step(const FiniteDynamicalSystem& sys, const TowerFamily& fam) {
  Rational worst(0);
  const int m = fam.m, k = fam.k;
  for (std::size_t l = 0; l < fam.tower_count(); ++l)
    for (int j = -m - k; j <= m + k; ++j)
      for (int i = -k; i <= k; ++i)
        for (PointIndex x = 0; x < sys.size(); ++x)
          worst = std::max(worst, abs_r(fam.value(l, j, oracle::iterate(sys, x, i)) - fam.value(l, j - i, x)));
  return worst;
}

Rational brute_sum_deviation(const FiniteDynamicalSystem&, const TowerFamily& fam) {
  Rational worst(0);
  for (PointIndex x : fam.K) {
    Rational total(0);
    for (std::size_t l = 0; l < fam.tower_count(); ++l)
      for (int j = -fam.m - 1; j <= fam.m + 1; ++j) total += fam.value(l, j, x);
    worst = std::max(worst, abs_r(total - Rational(1)));
  }
  return worst;
}

int least_valid_m(int d, int k_prime) {
  int m = k_prime;
  while (!tower_length_ok(d, k_prime, m)) ++m;
  return m;
}

CyclicTower indicator_tower(const FiniteDynamicalSystem& sys, int m) {
  // f_j = indicator of positions congruent to j mod 2m+1 on a cycle whose length is a multiple.
  CyclicTower t;
  t.first = -m;
  const auto period = static_cast<std::size_t>(2 * m + 1);
  for (int j = -m; j <= m; ++j) {
    std::vector<double> f(sys.size(), 0.0);
    for (PointIndex x = 0; x < sys.size(); ++x) {
      const auto pos = sys.orbits().index[x].position;
      if (pos % period == static_cast<std::size_t>(j + m)) f[x] = 1.0;
    }
    t.levels.push_back(std::move(f));
  }
  return t;
}

} // namespace

TEST(CeilInverse, StableAtExactReciprocals) {
  EXPECT_EQ(ceil_inverse(0.5), 2);
  EXPECT_EQ(ceil_inverse(0.25), 4);
  EXPECT_EQ(ceil_inverse(0.01), 100);
  EXPECT_EQ(ceil_inverse(0.1), 10);
  EXPECT_EQ(ceil_inverse(0.3), 4);
  EXPECT_THROW(ceil_inverse(0.0), PreconditionError);
}

TEST(TowerSupports, ShiftFormulaSmall) {
  const std::vector<std::size_t> L{100};
  const auto sys = make_cycle_system(L, 0);
  const auto cert = greedy_markers(sys, 2, all_points(sys), 0);
  const auto s = tower_supports(sys, cert, 0, 1, 2);
  EXPECT_EQ(s.shifts, (std::vector<std::int64_t>{2, 5, 8}));
  ASSERT_EQ(s.supports.size(), 3u);
  for (std::size_t l = 0; l < 3; ++l)
    for (PointIndex z : cert.Z) EXPECT_TRUE(contains(s.supports[l], oracle::iterate(sys, z, s.shifts[l])));
  EXPECT_TRUE(s.translates_disjoint);
  EXPECT_TRUE(s.covers_K);
}

TEST(TowerSupports, ShiftFormulaDimensionOne) {
  const std::vector<std::size_t> L{200};
  const auto sys = make_cycle_system(L, 1);
  const auto cert = greedy_markers(sys, 9, all_points(sys), 1);
  const auto s = tower_supports(sys, cert, 1, 1, 9);
  ASSERT_EQ(s.shifts.size(), 5u);
  for (std::size_t l = 0; l < 5; ++l) EXPECT_EQ(s.shifts[l], 17 * static_cast<std::int64_t>(l) + 9);
}

TEST(TowerSupports, RejectsShortTowers) {
  const std::vector<std::size_t> L{100};
  const auto sys = make_cycle_system(L, 0);
  const auto cert = greedy_markers(sys, 1, all_points(sys), 0);
  EXPECT_THROW(tower_supports(sys, cert, 0, 1, 1), PreconditionError);
  EXPECT_FALSE(tower_length_ok(0, 1, 1));
  EXPECT_TRUE(tower_length_ok(0, 1, 2));
}

TEST(BuildPartition, EqualSplitSumsToOne) {
  oracle::Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = trial % 3, kp = 1 + trial % 2;
    const int m = least_valid_m(d, kp);
    const std::size_t N0 = static_cast<std::size_t>((d + 1) * (4 * m + 1));
    const auto sys = oracle::random_cycles(rng, 2, N0 + 1, 3 * N0, d);
    const auto K = all_points(sys);
    const auto cert = greedy_markers(sys, m, K, d);
    const auto sup = tower_supports(sys, cert, d, kp, m);
    const auto p = build_partition(sys, sup, m, kp, K);
    std::vector<Rational> total(sys.size(), Rational(0));
    std::vector<int> pairs(sys.size(), 0);
    for (const auto& level : p.levels)
      for (const auto& [j, f] : level) {
        EXPECT_LE(std::abs(j), m - kp);
        for (const auto& [x, v] : f.entries()) {
          total[x] += v;
          ++pairs[x];
        }
      }
    for (const auto& level : p.levels)
      for (const auto& [j, f] : level)
        for (const auto& [x, v] : f.entries()) EXPECT_EQ(v, Rational(1, pairs[x]));
    for (PointIndex x = 0; x < sys.size(); ++x) EXPECT_EQ(total[x] + p.remainder[x], Rational(1));
  }
}

TEST(FolnerAverage, WidthOneKeepsPartition) {
  const std::vector<std::size_t> L{30};
  const auto sys = make_cycle_system(L, 0);
  PartitionOfUnity p;
  p.m = 0;
  p.K_prime = all_points(sys);
  std::vector<std::pair<PointIndex, Rational>> ones;
  for (PointIndex x = 0; x < sys.size(); ++x) ones.emplace_back(x, Rational(1));
  p.levels.push_back({{0, SparseFunction(ones)}});
  const auto fam = folner_average(sys, p, 0);
  ASSERT_EQ(fam.levels.size(), 1u);
  for (PointIndex x = 0; x < sys.size(); ++x) EXPECT_EQ(fam.value(0, 0, x), Rational(1));
}

TEST(FolnerAverage, ValuesAreFifthsOfPartitionValues) {
  const std::vector<std::size_t> L{100};
  const auto sys = make_cycle_system(L, 0);
  const auto K = all_points(sys);
  const auto fam = build_tower_family(sys, K, 0, 1, 5, 0.5);
  EXPECT_EQ(fam.k_prime, 2);
  const auto cert = greedy_markers(sys, 5, K, 0);
  const auto p = build_partition(sys, tower_supports(sys, cert, 0, 2, 5), 5, 2, K);
  std::int64_t common = 1;
  for (const auto& level : p.levels)
    for (const auto& [j, f] : level)
      for (const auto& [x, v] : f.entries()) common = std::lcm(common, v.denominator());
  for (const auto& level : fam.levels)
    for (const auto& [j, mu] : level) {
      for (const auto& [x, v] : mu.entries()) {
        EXPECT_EQ((5 * common) % v.denominator(), 0) << v;
        EXPECT_TRUE(v >= Rational(0) && v <= Rational(1));
      }
      if (!mu.empty()) {
        EXPECT_LE(std::abs(j), fam.m);
      }
    }
}

TEST(VerifyTower, StepAndSumAgreeWithBruteForce) {
  const std::vector<std::size_t> L{100};
  const auto sys = make_cycle_system(L, 0);
  const auto fam = build_tower_family(sys, all_points(sys), 0, 1, 5, 0.5);
  const auto v = verify_tower(sys, fam);
  EXPECT_TRUE(v.passed());
  EXPECT_EQ(v.step_bound, Rational(2, 5));
  EXPECT_EQ(v.max_step, brute_step(sys, fam));
  EXPECT_LE(brute_step(sys, fam), Rational(2, 5));
  EXPECT_EQ(brute_sum_deviation(sys, fam), Rational(0));
}

TEST(VerifyTower, QuarterEpsilonBound) {
  const std::vector<std::size_t> L{120};
  const auto sys = make_cycle_system(L, 0);
  const int m = least_valid_m(0, 4);
  const auto fam = build_tower_family(sys, all_points(sys), 0, 1, m, 0.25);
  const auto v = verify_tower(sys, fam);
  EXPECT_EQ(v.step_bound, Rational(2, 9));
  EXPECT_NEAR(to_double(v.step_bound), 0.2222, 1e-4);
  EXPECT_LE(brute_step(sys, fam), Rational(2, 9));
  EXPECT_TRUE(v.passed());
}

TEST(VerifyTower, SupportsVanishOutsideWindowAndStayInShiftedBases) {
  oracle::Rng rng(13);
  for (int trial = 0; trial < 6; ++trial) {
    const int d = trial % 3, k = 1 + trial % 2;
    const double eps = trial < 3 ? 0.5 : 0.25;
    const int kp = k * static_cast<int>(ceil_inverse(eps));
    const int m = least_valid_m(d, kp);
    const std::size_t N0 = static_cast<std::size_t>((d + 1) * (4 * m + 1));
    const auto sys = oracle::random_cycles(rng, 2, N0 + 1, 2 * N0, d);
    const auto fam = build_tower_family(sys, all_points(sys), d, k, m, eps);
    EXPECT_EQ(fam.tower_count(), static_cast<std::size_t>(2 * d + 3));
    for (std::size_t l = 0; l < fam.tower_count(); ++l) {
      for (PointIndex x = 0; x < sys.size(); ++x) {
        EXPECT_EQ(fam.value(l, m + 1, x), Rational(0));
        EXPECT_EQ(fam.value(l, -m - 1, x), Rational(0));
      }
      for (int j = -m; j <= m; ++j) {
        const PointSet allowed = image(fam.supports.supports[l], sys.shift_permutation(j));
        for (PointIndex x = 0; x < sys.size(); ++x)
          if (fam.value(l, j, x) != Rational(0)) {
            EXPECT_TRUE(contains(allowed, x));
          }
      }
    }
  }
}

TEST(Conversions, StatedTolerances) {
  EXPECT_DOUBLE_EQ(stated_decay_tolerance(0.1, 5), 0.2);
  EXPECT_DOUBLE_EQ(stated_decay_tolerance(0.3, 1), 0.8);
  EXPECT_DOUBLE_EQ(certified_decay_tolerance(0.1, 5), 0.1 + 1.0 / 6.0);
}

TEST(Conversions, ConstantTowerGivesWeights) {
  const std::vector<std::size_t> L{7};
  const auto sys = make_cycle_system(L, 0);
  CyclicTower t;
  const int m = 3;
  t.first = -m;
  t.levels.assign(2 * m + 1, std::vector<double>(sys.size(), 1.0));
  const auto [first, second] = cyclic_to_decaying(sys, t);
  for (int j = -m; j <= m; ++j)
    for (double v : first.at(j)) EXPECT_DOUBLE_EQ(v, decay_weight(j, m));
  for (int j = -m; j <= m; ++j) EXPECT_DOUBLE_EQ(decay_weight(j, m), 1.0 - std::abs(j) / double(m + 1));
  // Both towers together carry weight one at each index.
  for (int j = 0; j <= m; ++j)
    for (PointIndex x = 0; x < sys.size(); ++x) EXPECT_NEAR(first.at(j)[x] + second.at(j)[x], 1.0, 1e-15);
}

TEST(Conversions, DecayingStepWithinCertifiedTolerance) {
  oracle::Rng rng(21);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  for (int m : {1, 2, 5}) {
    const std::vector<std::size_t> L{static_cast<std::size_t>(4 * (2 * m + 1))};
    const auto sys = make_cycle_system(L, 0);
    CyclicTower t = indicator_tower(sys, m);
    for (auto& f : t.levels)
      for (double& v : f) v = std::clamp(v + 0.03 * noise(rng), 0.0, 1.0);
    t.tolerance = measure_cyclic_step(sys, t);
    const auto [a, b] = cyclic_to_decaying(sys, t);
    EXPECT_LE(measure_decaying_step(sys, a), certified_decay_tolerance(t.tolerance, m) + 1e-12);
    EXPECT_LE(measure_decaying_step(sys, b), certified_decay_tolerance(t.tolerance, m) + 1e-12);
  }
}

TEST(Conversions, VanishingEndsKeepTolerance) {
  const std::vector<std::size_t> L{10};
  const auto sys = make_cycle_system(L, 0);
  DecayingTower t;
  t.first = -2;
  t.levels.assign(5, std::vector<double>(sys.size(), 0.0));
  t.levels[2][0] = 1.0;
  t.tolerance = 1.0;
  const auto c = decaying_to_cyclic(sys, t);
  EXPECT_DOUBLE_EQ(c.tolerance, t.tolerance);
  EXPECT_EQ(c.m(), 2);
}

TEST(Conversions, SmallEndsGiveTwoEpsilonWrap) {
  const double eps = 0.05;
  const int m = 3;
  const std::vector<std::size_t> L{static_cast<std::size_t>(3 * (2 * m + 1))};
  const auto sys = make_cycle_system(L, 0);
  CyclicTower base = indicator_tower(sys, m);
  DecayingTower t;
  t.first = -m;
  t.levels = base.levels;
  for (double& v : t.levels.front()) v *= eps * 0.9;
  for (double& v : t.levels.back()) v *= eps * 0.9;
  const auto c = decaying_to_cyclic(sys, t);
  // The wraparound step from f_m to f_{-m}.
  double wrap = 0.0;
  for (PointIndex x = 0; x < sys.size(); ++x)
    wrap = std::max(wrap, std::abs(t.levels.front()[x] - t.levels.back()[sys.backward(x)]));
  EXPECT_LE(wrap, 2 * eps);
  EXPECT_LE(measure_cyclic_step(sys, c), std::max(measure_decaying_step(sys, t), 2 * eps));
}
