#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "nucdim/dynsys.hpp"
#include "nucdim/markers.hpp"

namespace nucdim {

// A [0,1]-valued function stored by its nonzero values, sorted by point.
class SparseFunction {
public:
  SparseFunction() = default;
  explicit SparseFunction(std::vector<std::pair<PointIndex, Rational>> entries);

  Rational at(PointIndex x) const;
  const std::vector<std::pair<PointIndex, Rational>>& entries() const { return entries_; }
  PointSet support() const;
  bool empty() const { return entries_.empty(); }
  Rational sup() const;

private:
  std::vector<std::pair<PointIndex, Rational>> entries_;
};

// Functions indexed by j for one tower index l.
using TowerLevel = std::map<int, SparseFunction>;

struct TowerSupports {
  int d = 0;
  int k = 0;
  int m = 0;
  std::vector<std::int64_t> shifts; // (2(m-k)+1) l + (m-k) + 1
  std::vector<PointSet> supports;   // Z^{(l)}
  bool translates_disjoint = false; // shifted copies -m..m of each Z^{(l)} are disjoint
  bool covers_K = false;            // K inside the shifts -(m-k)..(m-k) of the Z^{(l)}
};

struct PartitionOfUnity {
  int m = 0;
  int k_prime = 0;
  PointSet K_prime;
  std::vector<TowerLevel> levels; // p_j^{(l)} for |j| <= m - k'
  std::vector<Rational> remainder; // p^{(infinity)}, dense over points
};

struct TowerFamily {
  int d = 0;
  int k = 0;
  int m = 0;
  double epsilon = 0.0;
  int k_prime = 0;
  PointSet K;
  PointSet K_prime;
  MarkerCertificate markers;
  TowerSupports supports;
  std::vector<TowerLevel> levels; // mu_j^{(l)}; absent j means the zero function

  Rational value(std::size_t l, int j, PointIndex x) const;
  std::size_t tower_count() const { return levels.size(); }
};

struct TowerVerification {
  Rational max_sum_deviation;   // max over K of |sum mu - 1|
  double max_sum_deviation_float = 0.0;
  Rational max_step;            // max over l, j, |i| <= k of ||mu_j o shift_i - mu_{j-i}||
  double max_step_float = 0.0;
  Rational step_bound;          // 2k / (2k'+1)
  bool sum_ok = false;
  bool step_ok = false;         // max_step <= step_bound and step_bound < epsilon
  bool supports_disjoint = false;
  bool supports_contained = false; // supp mu_j inside shift_j(Z^{(l)}), zero for |j| > m
  bool values_in_unit = false;
  bool passed() const {
    return sum_ok && step_ok && supports_disjoint && supports_contained && values_in_unit;
  }
};

// ceil(1/eps), stable against representation error in eps.
std::int64_t ceil_inverse(double eps);

// True iff 2m >= 2(2d+3)k - d - 2, the integer form of the tower length condition.
bool tower_length_ok(int d, int k, int m);

TowerSupports tower_supports(const FiniteDynamicalSystem& sys, const MarkerCertificate& cert,
                             int d, int k, int m);

PartitionOfUnity build_partition(const FiniteDynamicalSystem& sys, const TowerSupports& supports,
                                 int m, int k_prime, const PointSet& K_prime);

TowerFamily folner_average(const FiniteDynamicalSystem& sys, const PartitionOfUnity& partition,
                           int k_prime);

// Full pipeline: k' and K' are derived here, then markers, supports, partition, averaging.
TowerFamily build_tower_family(const FiniteDynamicalSystem& sys, const PointSet& K, int d, int k,
                               int m, double epsilon);

TowerVerification verify_tower(const FiniteDynamicalSystem& sys, const TowerFamily& family);

// ---- cyclic and decaying towers ----

// Functions f_j for j in [first, first + levels.size()), dense over points.
struct IndexedTower {
  int first = 0;
  std::vector<std::vector<double>> levels;
  double tolerance = 0.0;

  int last() const { return first + static_cast<int>(levels.size()) - 1; }
  const std::vector<double>& at(int j) const { return levels.at(static_cast<std::size_t>(j - first)); }
};

// Indices -m..m with cyclic arithmetic modulo 2m+1.
struct CyclicTower : IndexedTower {
  int m() const { return (static_cast<int>(levels.size()) - 1) / 2; }
};

struct DecayingTower : IndexedTower {};

// max_j ||f_{j+1} - f_j o shift_{-1}||, indices modulo 2m+1.
double measure_cyclic_step(const FiniteDynamicalSystem& sys, const CyclicTower& t);
// Same without wraparound.
double measure_decaying_step(const FiniteDynamicalSystem& sys, const DecayingTower& t);
// max(||f_first||, ||f_last||).
double end_norm(const DecayingTower& t);

// g(j) = 1 - |j|/(m+1) for j in [-m, m], extended with the tower period 2m+1.
double decay_weight(int j, int m);
double stated_decay_tolerance(double eps, int m); // eps + 1/(2m)
double certified_decay_tolerance(double eps, int m); // eps + 1/(m+1)

std::pair<DecayingTower, DecayingTower> cyclic_to_decaying(const FiniteDynamicalSystem& sys,
                                                           const CyclicTower& tower);
CyclicTower decaying_to_cyclic(const FiniteDynamicalSystem& sys, const DecayingTower& tower);

} // namespace nucdim
