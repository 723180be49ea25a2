#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "nucdim/crossed_element.hpp"
#include "nucdim/error.hpp"
#include "nucdim/fiber_rep.hpp"
#include "nucdim/norm.hpp"
#include "nucdim/periodic.hpp"
#include "oracles.hpp"

using namespace nucdim;

namespace {

const Complex I(0.0, 1.0);

FiniteDynamicalSystem cycles(std::vector<std::size_t> lengths, int d = 0) { return make_cycle_system(lengths, d); }

CrossedElement u_power(const FiniteDynamicalSystem& sys, int p) { return CrossedElement::unitary_power(sys, p); }

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double coefficient_sum(const CrossedElement& a) {
  double s = 0.0;
  for (const auto& [i, f] : a.coefficients()) s += sup_norm(f);
  return s;
}

} // namespace

TEST(CrossedElement, ProductOnTwoCycleVanishes) {
  const auto sys = cycles({2});
  const Function f = indicator(2, {0});
  const auto fu = CrossedElement::monomial(sys, f, 1);
  const auto prod = fu * fu;
  EXPECT_TRUE(prod.is_zero());
  // g o forward^{-1} is the indicator of the other point.
  const auto g_shifted = u_power(sys, 1) * CrossedElement::function(sys, f) * u_power(sys, -1);
  EXPECT_EQ(g_shifted.coefficient(0)[1], Complex(1.0));
  EXPECT_EQ(g_shifted.coefficient(0)[0], Complex(0.0));
}

TEST(CrossedElement, UnitAndUnitaryRelations) {
  oracle::Rng rng(1);
  const auto sys = cycles({3, 5});
  const auto a = oracle::random_element(sys, 2, rng);
  const auto one = CrossedElement::identity(sys);
  EXPECT_LE(coefficient_distance(a * one, a), 1e-15);
  EXPECT_LE(coefficient_distance(one * a, a), 1e-15);
  const auto u = u_power(sys, 1);
  EXPECT_LE(coefficient_distance(u * adjoint(u), one), 1e-15);
  EXPECT_LE(coefficient_distance(adjoint(u) * u, one), 1e-15);
}

TEST(CrossedElement, CovariancePointwise) {
  oracle::Rng rng(9);
  const auto sys = cycles({4, 7});
  const Function f = oracle::random_function(sys.size(), rng);
  const auto lhs = u_power(sys, 1) * CrossedElement::function(sys, f) * u_power(sys, -1);
  for (PointIndex x = 0; x < sys.size(); ++x)
    EXPECT_LE(std::abs(lhs.coefficient(0)[x] - f[oracle::iterate(sys, x, -1)]), 1e-15);
}

TEST(CrossedElement, AdjointIdentities) {
  oracle::Rng rng(3);
  const auto sys = cycles({1, 4, 6});
  const Function f = oracle::random_function(sys.size(), rng);
  const auto fa = adjoint(CrossedElement::function(sys, f));
  for (PointIndex x = 0; x < sys.size(); ++x) EXPECT_EQ(fa.coefficient(0)[x], std::conj(f[x]));

  for (int trial = 0; trial < 20; ++trial) {
    const auto a = CrossedElement::monomial(sys, oracle::random_function(sys.size(), rng), 1);
    const auto b = CrossedElement::monomial(sys, oracle::random_function(sys.size(), rng), 1);
    EXPECT_LE(coefficient_distance(adjoint(a * b), adjoint(b) * adjoint(a)), 1e-14);
    const auto c = oracle::random_element(sys, 2, rng);
    const auto e = oracle::random_element(sys, 1, rng);
    EXPECT_LE(coefficient_distance(adjoint(c * e), adjoint(e) * adjoint(c)), 1e-13);
    EXPECT_LE(coefficient_distance(adjoint(adjoint(c)), c), 1e-15);
  }
}

TEST(CrossedElement, AssociativeAndDistributive) {
  oracle::Rng rng(17);
  const auto sys = cycles({2, 5});
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = oracle::random_element(sys, 1, rng);
    const auto b = oracle::random_element(sys, 2, rng);
    const auto c = oracle::random_element(sys, 1, rng);
    EXPECT_LE(coefficient_distance((a * b) * c, a * (b * c)), 1e-13);
    EXPECT_LE(coefficient_distance(a * (b + c), a * b + a * c), 1e-13);
  }
}

TEST(Expectation, RecoversCoefficients) {
  oracle::Rng rng(6);
  const auto sys = cycles({3, 8});
  const auto fu = CrossedElement::monomial(sys, oracle::random_function(sys.size(), rng), 1);
  for (Complex v : expectation(fu)) EXPECT_EQ(v, Complex(0.0));
  const Function f = oracle::random_function(sys.size(), rng);
  EXPECT_EQ(expectation(CrossedElement::function(sys, f)), f);

  const auto b = oracle::random_element(sys, 3, rng);
  for (int j = -3; j <= 3; ++j) {
    const Function got = expectation(b * u_power(sys, -j));
    const Function want = b.coefficient(j);
    for (PointIndex x = 0; x < sys.size(); ++x) EXPECT_LE(std::abs(got[x] - want[x]), 1e-15);
  }
}

TEST(OrbitRep, UnitaryImageAndPower) {
  oracle::Rng rng(7);
  const auto sys = cycles({1, 4, 9});
  for (std::size_t c = 0; c < sys.orbits().cycles.size(); ++c) {
    const Complex lambda = oracle::random_unit(rng);
    const auto rep = orbit_rep(sys, c, lambda);
    const std::size_t L = rep.dimension();
    const Matrix v = rep.of_unitary(1);
    EXPECT_LE(max_abs(v * v.adjoint() - Matrix::Identity(L, L)), 1e-14);
    Matrix p = Matrix::Identity(L, L);
    for (std::size_t i = 0; i < L; ++i) p = p * v;
    EXPECT_LE(max_abs(p - lambda * Matrix::Identity(L, L)), 1e-13);
    EXPECT_LE(max_abs(rep.of_function(constant_function(sys.size(), 1.0)) - Matrix::Identity(L, L)), 0.0);
  }
  EXPECT_THROW(orbit_rep(sys, 0, Complex(1.1, 0.0)), PreconditionError);
  EXPECT_THROW(orbit_rep(sys, 5, Complex(1.0, 0.0)), PreconditionError);
}

TEST(OrbitRep, DiagonalFollowsBackwardOrbit) {
  oracle::Rng rng(8);
  const auto sys = cycles({6});
  const Function f = oracle::random_function(sys.size(), rng);
  const auto rep = orbit_rep(sys, 0, 1.0);
  const Matrix D = rep.of_function(f);
  const PointIndex y = sys.orbits().cycles[0].base;
  for (std::size_t r = 0; r < 6; ++r) {
    EXPECT_EQ(D(r, r), f[oracle::iterate(sys, y, -static_cast<std::int64_t>(r))]);
    EXPECT_EQ(rep.basis_point(r), oracle::iterate(sys, y, -static_cast<std::int64_t>(r)));
  }
}

TEST(OrbitRep, CovarianceOnTwoCycle) {
  oracle::Rng rng(10);
  const auto sys = cycles({2});
  for (int trial = 0; trial < 20; ++trial) {
    const Function f = oracle::random_function(2, rng);
    Function g(2);
    for (PointIndex x = 0; x < 2; ++x) g[x] = f[sys.backward(x)];
    const auto rep = orbit_rep(sys, 0, oracle::random_unit(rng));
    const Matrix v = rep.of_unitary(1);
    EXPECT_LE((v * rep.of_function(f) * v.adjoint() - rep.of_function(g)).norm(), 1e-12);
  }
}

TEST(OrbitRep, Multiplicative) {
  oracle::Rng rng(12);
  const auto sys = cycles({3, 5});
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = oracle::random_element(sys, 2, rng);
    const auto b = oracle::random_element(sys, 3, rng);
    for (std::size_t c = 0; c < 2; ++c) {
      const auto rep = orbit_rep(sys, c, oracle::random_unit(rng));
      EXPECT_LE(max_abs(rep(a * b) - rep(a) * rep(b)), 1e-12);
      EXPECT_LE(max_abs(rep(adjoint(a)) - rep(a).adjoint()), 1e-14);
    }
  }
}

TEST(Norm, BasicValues) {
  const auto sys = cycles({3, 10});
  EXPECT_NEAR(norm(u_power(sys, 1)).value, 1.0, 1e-12);
  EXPECT_NEAR(norm(CrossedElement::function(sys, indicator(sys.size(), {0}))).value, 1.0, 1e-12);

  const auto fixed = cycles({1});
  const auto b = CrossedElement::identity(fixed) + u_power(fixed, 1);
  const auto r = norm(b);
  EXPECT_LE(r.value, 2.0 + 1e-12);
  EXPECT_GE(r.upper(), 2.0 - 1e-12);
  EXPECT_LE(2.0 - r.value, 1e-3);
}

TEST(Norm, BracketsRegularRepresentationOracle) {
  oracle::Rng rng(100);
  for (int trial = 0; trial < 12; ++trial) {
    const auto sys = oracle::random_cycles(rng, 2, 1, 8, 0);
    const auto a = oracle::random_element(sys, 1 + trial % 2, rng);
    const auto r = norm(a);
    const double ref = oracle::regular_norm(a, rng);
    EXPECT_LE(ref, r.upper() * (1 + 1e-9)) << trial;
    EXPECT_LE(std::abs(r.value - ref), 1e-2 * ref) << trial;
  }
}

TEST(Norm, CStarIdentityAndSubadditivity) {
  oracle::Rng rng(101);
  const auto sys = cycles({2, 6, 7});
  for (int trial = 0; trial < 8; ++trial) {
    const auto a = oracle::random_element(sys, 2, rng);
    const auto b = oracle::random_element(sys, 1, rng);
    const auto na = norm(a), nb = norm(b);
    const auto nstar = norm(adjoint(a) * a);
    EXPECT_NEAR(nstar.value, na.value * na.value, 3 * na.upper() * 1e-3 + 1e-3);
    EXPECT_LE(norm(a + b).value, na.upper() + nb.upper() + 1e-12);
    EXPECT_LE(norm(a * b).value, na.upper() * nb.upper() + 1e-12);
    EXPECT_LE(na.value, coefficient_sum(a) + 1e-12);
  }
}

TEST(Norm, DenseAndKrylovAgree) {
  oracle::Rng rng(102);
  const auto sys = cycles({300});
  const auto a = oracle::random_element(sys, 2, rng);
  NormOptions dense, krylov;
  dense.dense_limit = 1000;
  krylov.dense_limit = 10;
  const auto rd = norm(a, dense), rk = norm(a, krylov);
  EXPECT_NEAR(rd.value, rk.value, 1e-6 * rd.value);
}

TEST(Norm, GridForHonoursTolerance) {
  for (double lip : {0.0, 0.5, 3.0, 100.0}) {
    const std::size_t G = grid_for(lip, 1e-3, std::size_t{1} << 22);
    EXPECT_EQ(G & (G - 1), 0u);
    EXPECT_LE(lip * std::numbers::pi / static_cast<double>(G), 1e-3);
  }
}

TEST(OrbitIsomorphism, UnitaryRoundTrip) {
  const auto sys = cycles({5});
  const OrbitIsomorphism iso(sys, 0, 64);
  const auto u = u_power(sys, 1);
  const auto samples = iso.forward(u);
  EXPECT_LE(coefficient_distance(iso.inverse(samples), u), 1e-12);
}

TEST(OrbitIsomorphism, RandomRoundTrip) {
  oracle::Rng rng(14);
  const auto sys = cycles({12});
  const OrbitIsomorphism iso(sys, 0, 256);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = oracle::random_element(sys, 4, rng);
    EXPECT_LE(coefficient_distance(iso.inverse(iso.forward(a)), a), 1e-9);
  }
}

TEST(OrbitIsomorphism, SamplesMatchOrbitRep) {
  oracle::Rng rng(15);
  const auto sys = cycles({4});
  const OrbitIsomorphism iso(sys, 0, 16);
  const auto a = oracle::random_element(sys, 2, rng);
  const auto samples = iso.forward(a);
  for (std::size_t g = 0; g < iso.grid(); ++g)
    EXPECT_LE(max_abs(samples[g] - orbit_rep(sys, 0, iso.grid_point(g))(a)), 1e-13);
}

TEST(OrbitIsomorphism, AliasingIsFlagged) {
  oracle::Rng rng(16);
  const auto sys = cycles({3});
  const OrbitIsomorphism iso(sys, 0, 4);
  const auto a = oracle::random_element(sys, 8, rng);
  EXPECT_THROW(iso.forward(a), PreconditionError);
  EXPECT_THROW(OrbitIsomorphism(sys, 0, 6), PreconditionError);
}

TEST(Periodic, IdentityMapIsTrivial) {
  oracle::Rng rng(18);
  const auto sys = cycles({1, 1, 1});
  const auto emb = periodic_embedding(sys, 1, 64);
  const Function f = oracle::random_function(3, rng);
  for (PointIndex y = 0; y < 3; ++y) EXPECT_EQ(emb.beta(f, y)(0, 0), f[y]);
  const Complex z = oracle::random_unit(rng);
  EXPECT_EQ(emb.u_matrix(z)(0, 0), z);
  EXPECT_LE(emb.covariance_residual(f), 1e-15);
}

TEST(Periodic, CovarianceAndDiagram) {
  oracle::Rng rng(19);
  const auto sys = cycles({2, 2, 1});
  const auto emb = periodic_embedding(sys, 2, 64);
  for (int trial = 0; trial < 10; ++trial) {
    EXPECT_LE(emb.covariance_residual(oracle::random_function(sys.size(), rng)), 1e-12);
    const auto a = oracle::random_element(sys, 1, rng);
    EXPECT_LE(emb.commuting_square_residual(a), 1e-9);
    EXPECT_LE(emb.round_trip_residual(a), 1e-9);
  }
  EXPECT_LE(emb.unitarity_residual(), 1e-14);
}

TEST(Periodic, EvaluateIsMultiplicative) {
  oracle::Rng rng(20);
  const auto sys = make_rotation_system(6, 2);
  const auto emb = periodic_embedding(sys, 3, 8);
  const auto a = oracle::random_element(sys, 1, rng);
  const auto b = oracle::random_element(sys, 1, rng);
  for (PointIndex y = 0; y < sys.size(); ++y) {
    const Complex z = oracle::random_unit(rng);
    EXPECT_LE(max_abs(emb.evaluate(a * b, y, z) - emb.evaluate(a, y, z) * emb.evaluate(b, y, z)), 1e-12);
  }
}

TEST(Periodic, RejectsWrongPeriod) {
  const auto sys = cycles({2, 3});
  EXPECT_THROW(periodic_embedding(sys, 4, 8), PreconditionError);
  EXPECT_EQ(system_period(sys), 6u);
  EXPECT_NO_THROW(periodic_embedding(sys, 12, 8));
}

TEST(PrimSpectrum, Strata) {
  const auto rep = prim_spectrum(cycles({2, 2, 5}));
  ASSERT_EQ(rep.strata.size(), 2u);
  EXPECT_EQ(rep.strata[0].k, 2u);
  EXPECT_EQ(rep.strata[0].orbit_count, 2u);
  EXPECT_EQ(rep.strata[1].k, 5u);
  EXPECT_EQ(rep.strata[1].orbit_count, 1u);
  EXPECT_EQ(rep.period, 10u);
  EXPECT_EQ(rep.max_irreducible_dimension, 5u);

  const auto fixed = prim_spectrum(cycles({1, 1, 1, 1}));
  ASSERT_EQ(fixed.strata.size(), 1u);
  EXPECT_EQ(fixed.strata[0].k, 1u);
  EXPECT_EQ(fixed.max_irreducible_dimension, 1u);
}

TEST(PrimSpectrum, DimensionsBoundedByPeriod) {
  oracle::Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const auto sys = oracle::random_cycles(rng, 3, 1, 6, 0);
    const auto rep = prim_spectrum(sys);
    for (const auto& s : rep.strata) EXPECT_LE(s.k, rep.period);
  }
}

TEST(Holonomy, Examples) {
  auto shift_with = [](std::vector<Complex> entries) {
    const auto k = static_cast<Eigen::Index>(entries.size());
    Matrix v = Matrix::Zero(k, k);
    for (Eigen::Index i = 0; i + 1 < k; ++i) v(i, i + 1) = entries[static_cast<std::size_t>(i)];
    v(k - 1, 0) = entries.back();
    return v;
  };
  EXPECT_LE(std::abs(holonomy_lambda(shift_with({1.0, 1.0, 1.0, 1.0})) - 1.0), 1e-14);

  const Matrix v3 = shift_with({I, 1.0, -1.0});
  EXPECT_LE(std::abs(holonomy_lambda(v3) + I), 1e-14);
  const Matrix cube = v3 * v3 * v3;
  EXPECT_LE(max_abs(cube - (-I) * Matrix::Identity(3, 3)), 1e-14);

  Matrix one(1, 1);
  one(0, 0) = I;
  EXPECT_EQ(holonomy_lambda(one), I);

  const auto sys = cycles({5});
  const Complex lambda = std::polar(1.0, 0.7);
  EXPECT_LE(std::abs(holonomy_lambda(orbit_rep(sys, 0, lambda)) - lambda), 1e-13);

  Matrix bad = shift_with({1.0, 1.0});
  bad(0, 0) = 0.5;
  EXPECT_THROW(holonomy_lambda(bad), PreconditionError);
}
