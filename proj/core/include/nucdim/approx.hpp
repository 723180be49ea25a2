#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nucdim/crossed_element.hpp"
#include "nucdim/dynsys.hpp"
#include "nucdim/norm.hpp"
#include "nucdim/towers.hpp"

namespace nucdim {

struct ApproxOptions {
  std::optional<int> d;            // defaults to the system's declared dimension
  std::optional<std::size_t> N;    // overrides the split threshold
  std::optional<std::vector<double>> e; // caller-supplied quasicentral element
  NormOptions norm;
  bool structural_checks = true;   // positivity, contractivity, multiplicativity, order zero
  std::uint64_t seed = 0x5eed;
};

struct ApproxParams {
  double epsilon = 0.0;
  int d = 0;
  int k = 1;
  double epsilon_prime = 0.0;
  std::int64_t ceil_inverse_epsilon_prime = 0;
  int m = 0;
  std::size_t N = 0;          // threshold actually used for the split
  std::size_t N_formula = 0;  // (d+1)(4m+1)
  InvariantSplit split;
  bool ideal_path_active = false;
  std::vector<double> member_norms; // certified upper bounds
};

// k = max(1, largest support radius); eps' = (eps/(2k+1))^2; m = (2d+3) k ceil(1/eps');
// N = (d+1)(4m+1). Throws if some member has norm above 1 + tol, or if an N override
// leaves a cycle of length <= (d+1)(4m+1) in the complement.
ApproxParams derive_params(const FiniteDynamicalSystem& sys, const std::vector<CrossedElement>& F,
                           double epsilon, const ApproxOptions& opts = {});

struct QuasicentralUnit {
  std::vector<double> e;
  bool supplied = false;
  bool central = false;            // e is the indicator of an invariant set
  std::vector<double> commutator;  // ||[e, b]|| per member, certified upper bound
  std::vector<double> splitting;   // ||e^{1/2} b e^{1/2} + (1-e)^{1/2} b (1-e)^{1/2} - b||
};

QuasicentralUnit quasicentral_unit(const FiniteDynamicalSystem& sys, const InvariantSplit& split,
                                   const std::vector<CrossedElement>& F,
                                   const std::optional<std::vector<double>>& supplied,
                                   const NormOptions& norm_opts = {});

// Quotient side: each cycle of Y viewed as M_L over the circle, sampled at s points.
class QuotientPieces {
public:
  using Image = std::vector<std::vector<Matrix>>; // [cycle slot][sample]

  QuotientPieces(FiniteDynamicalSystem host, std::vector<std::size_t> cycles, int k, double epsilon,
                 std::size_t declared_summands);

  const FiniteDynamicalSystem& host() const { return host_; }
  const std::vector<std::size_t>& cycles() const { return cycles_; }
  std::size_t samples(std::size_t slot) const { return samples_.at(slot); }
  std::optional<std::size_t> slot_of(std::size_t cycle) const;
  int k() const { return k_; }
  double epsilon() const { return epsilon_; }
  std::size_t summands_used() const { return cycles_.empty() ? 0 : 2; }
  std::size_t summands_declared() const { return declared_; }

  // b -> (pi_{t_j}(b))_j on every cycle of Y.
  Image psi(const CrossedElement& b) const;
  // theta -> sum_j h_j(theta) a_j; colour 0 or 1 keeps one parity of j, -1 keeps both.
  Matrix phi_at(const Image& a, std::size_t slot, double theta, int colour = -1) const;
  double phi_lipschitz(const Image& a, std::size_t slot, int colour = -1) const;
  FiberCorrection phi(Image a, int colour = -1) const;

  // sup over a fine theta grid of ||phi_c(a) phi_c(b)|| for random orthogonal a, b.
  double order_zero_residual(int colour, std::uint64_t seed) const;

private:
  FiniteDynamicalSystem host_;
  std::vector<std::size_t> cycles_;
  std::vector<std::size_t> samples_;
  int k_;
  double epsilon_;
  std::size_t declared_;
};

// s = ceil(2 pi L k / eps), rounded up to an even number.
std::size_t quotient_samples(std::size_t L, int k, double epsilon);

QuotientPieces quotient_approx(const FiniteDynamicalSystem& sys, const InvariantSplit& split, int k,
                               double epsilon, int d);

// Matrices over C(Z^{(l)}): one sparse (2m+1) x (2m+1) matrix per point of Z^{(l)},
// indexed by (a, b) in [-m, m]^2.
struct BlockFunction {
  int m = 0;
  std::vector<std::map<std::pair<int, int>, Complex>> at_point;

  Matrix dense(std::size_t z) const;
};

BlockFunction block_product(const BlockFunction& x, const BlockFunction& y);
BlockFunction block_adjoint(const BlockFunction& x);

class IdealPieces {
public:
  IdealPieces(FiniteDynamicalSystem host, TowerFamily towers);

  const TowerFamily& towers() const { return towers_; }
  std::size_t tower_count() const { return Z_.size(); }
  int m() const { return towers_.m; }
  const std::vector<PointIndex>& Z(std::size_t l) const { return Z_.at(l); }
  // sqrt(mu_j^{(l)}) at forward^j(z) for the zi-th point z of Z^{(l)}.
  double sqrt_mu(std::size_t l, int j, std::size_t zi) const;

  // sqrt(mu) Q c Q sqrt(mu) in the window [-m, m] around each z.
  BlockFunction psi(std::size_t l, const CrossedElement& c) const;
  // f (x) E_{ab} -> (f o forward^{-a}) u^{a-b}
  CrossedElement phi(std::size_t l, const BlockFunction& H) const;
  CrossedElement phi_psi(const CrossedElement& c) const;

  // max over towers and members of F of the sup of sum_i ||coefficient_i|| of phi(XY) - phi(X)phi(Y)
  // and phi(X*) - phi(X)* for random matrix units X, Y.
  std::pair<double, double> homomorphism_residuals(std::uint64_t seed, int trials) const;

  // max over l, |j| <= m + k, |i| <= k of ||sqrt(mu_{j-i}) o forward^{-i} - sqrt(mu_j)||.
  double sqrt_step(int k) const;

private:
  FiniteDynamicalSystem host_;
  TowerFamily towers_;
  std::vector<std::vector<PointIndex>> Z_;
  std::vector<std::vector<std::vector<double>>> sqrt_mu_; // [l][j+m][zi]
};

// Towers on K = support of e with (d, k, m, eps') from the parameters.
TowerFamily ideal_towers(const FiniteDynamicalSystem& sys, const ApproxParams& params, const std::vector<double>& e);
// Throws on a tower family that does not match the parameters.
IdealPieces ideal_approx(const FiniteDynamicalSystem& sys, const ApproxParams& params, TowerFamily towers);

// sum_i sup |a_i|: an upper bound for the norm.
double coefficient_bound(const CrossedElement& a);

// sqrt(e), sqrt(1 - e) as function elements.
CrossedElement sqrt_function(const FiniteDynamicalSystem& sys, const std::vector<double>& e, bool complement);
// e^{1/2} b e^{1/2} or (1-e)^{1/2} b (1-e)^{1/2}.
CrossedElement compress(const CrossedElement& b, const std::vector<double>& e, bool complement);

struct ClaimMeasure {
  std::vector<double> per_member; // certified upper bounds (value + tol)
  double max = 0.0;
  double bound = 0.0;             // claim bound + tol
  bool pass() const { return max <= bound; }
};

ClaimMeasure verify_quotient(const QuotientPieces& q, const std::vector<CrossedElement>& F,
                             const NormOptions& norm_opts);
ClaimMeasure verify_claim1(const QuotientPieces& q, const std::vector<CrossedElement>& F,
                           const std::vector<double>& e, int d, double epsilon, const NormOptions& norm_opts);
ClaimMeasure verify_claim2(const IdealPieces* ideal, const std::vector<CrossedElement>& F,
                           const std::vector<double>& e, int d, double epsilon, const NormOptions& norm_opts);

struct DimensionLedger {
  int d = 0;
  int quotient_term = 0;       // d+2
  int ideal_term_declared = 0; // (d+1)(2d+3)
  int ideal_term_actual = 0;   // 1 * (2d+3)
  int ledger_total = 0;        // 2d^2+6d+5
  int theorem_bound = 0;       // 2d^2+6d+4
  int actual_total = 0;        // (d+2) + (2d+3)
  int summand_count = 0;       // 3d+5
  int remark_d1 = 0;           // d+1
  int remark_d2 = 0;           // 2d+2
  int remark_total = 0;        // d1 + d2 + 1
  bool consistent = false;
};

DimensionLedger dimension_ledger(int d);

struct AssertionRow {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct StructuralChecks {
  double min_psd_eigenvalue = 0.0;     // over psi(b* b), both sides
  double contractivity_excess = 0.0;   // max ||psi(b)|| - ||b||
  double multiplicativity = 0.0;
  double adjoint = 0.0;
  double order_zero = 0.0;
  bool ran = false;
};

struct ApproxReport {
  ApproxParams params;
  QuasicentralUnit unit;
  std::optional<TowerVerification> towers;
  std::size_t tower_count = 0;
  double sqrt_step = 0.0;
  double sqrt_step_bound = 0.0;
  std::vector<std::size_t> quotient_cycles;
  std::vector<std::size_t> quotient_samples;
  ClaimMeasure quotient;
  ClaimMeasure claim1;
  ClaimMeasure claim2;
  ClaimMeasure final_error;
  StructuralChecks checks;
  DimensionLedger ledger;
  std::size_t summand_count = 0;
  std::vector<AssertionRow> assertions;

  bool passed() const;
};

// psi(b) = psi_Y(pi((1-e)^{1/2} b (1-e)^{1/2})) + psi_ideal(e^{1/2} b e^{1/2}); measures
// ||phi(psi(b)) - b|| against (3d+7) eps.
ClaimMeasure assemble_and_verify(const QuotientPieces& q, const IdealPieces* ideal,
                                 const std::vector<CrossedElement>& F, const std::vector<double>& e, int d,
                                 double epsilon, const NormOptions& norm_opts);

ApproxReport run_approximation(const FiniteDynamicalSystem& sys, const std::vector<CrossedElement>& F,
                               double epsilon, const ApproxOptions& opts = {});

} // namespace nucdim
