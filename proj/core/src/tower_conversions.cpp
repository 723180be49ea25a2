#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "nucdim/error.hpp"
#include "nucdim/towers.hpp"

namespace nucdim {

namespace {

double sup_norm(const std::vector<double>& f) {
  double s = 0.0;
  for (double v : f) s = std::max(s, std::abs(v));
  return s;
}

// ||g - f o shift_{-1}||: the forward map moves f one step along.
double step_between(const FiniteDynamicalSystem& sys, const std::vector<double>& f,
                    const std::vector<double>& g) {
  double s = 0.0;
  for (PointIndex x = 0; x < sys.size(); ++x) s = std::max(s, std::abs(g[x] - f[sys.backward(x)]));
  return s;
}

int wrap(int j, int m) {
  const int period = 2 * m + 1;
  int r = (j + m) % period;
  if (r < 0) r += period;
  return r - m;
}

void check_shape(const FiniteDynamicalSystem& sys, const IndexedTower& t) {
  if (t.levels.empty()) throw PreconditionError("tower has no levels");
  for (const auto& f : t.levels)
    if (f.size() != sys.size()) throw PreconditionError("tower level is not defined on every point");
}

} // namespace

double measure_cyclic_step(const FiniteDynamicalSystem& sys, const CyclicTower& t) {
  check_shape(sys, t);
  if (t.levels.size() % 2 == 0) throw PreconditionError("cyclic tower must have odd length 2m+1");
  const int m = t.m();
  double s = 0.0;
  for (int j = -m; j <= m; ++j) s = std::max(s, step_between(sys, t.at(j), t.at(wrap(j + 1, m))));
  return s;
}

double measure_decaying_step(const FiniteDynamicalSystem& sys, const DecayingTower& t) {
  check_shape(sys, t);
  double s = 0.0;
  for (int j = t.first; j < t.last(); ++j) s = std::max(s, step_between(sys, t.at(j), t.at(j + 1)));
  return s;
}

double end_norm(const DecayingTower& t) {
  if (t.levels.empty()) return 0.0;
  return std::max(sup_norm(t.levels.front()), sup_norm(t.levels.back()));
}

double decay_weight(int j, int m) {
  if (m < 1) throw PreconditionError("decay weight needs m >= 1");
  return 1.0 - static_cast<double>(std::abs(wrap(j, m))) / static_cast<double>(m + 1);
}

double stated_decay_tolerance(double eps, int m) { return eps + 1.0 / (2.0 * m); }
double certified_decay_tolerance(double eps, int m) { return eps + 1.0 / (m + 1.0); }

std::pair<DecayingTower, DecayingTower> cyclic_to_decaying(const FiniteDynamicalSystem& sys,
                                                           const CyclicTower& tower) {
  check_shape(sys, tower);
  const int m = tower.m();
  if (m < 1) throw PreconditionError("cyclic_to_decaying: m must be at least 1");
  // First tower weights g(j) on [-m, m]; second takes the complementary weights 1 - g(j)
  // on [0, 2m], reading f periodically. Each index carries total weight one.
  DecayingTower first, second;
  first.first = -m;
  second.first = 0;
  first.tolerance = second.tolerance = certified_decay_tolerance(tower.tolerance, m);
  for (int j = -m; j <= m; ++j) {
    std::vector<double> f = tower.at(j);
    for (double& v : f) v *= decay_weight(j, m);
    first.levels.push_back(std::move(f));
  }
  for (int j = 0; j <= 2 * m; ++j) {
    std::vector<double> f = tower.at(wrap(j, m));
    for (double& v : f) v *= 1.0 - decay_weight(j, m);
    second.levels.push_back(std::move(f));
  }
  return {std::move(first), std::move(second)};
}

CyclicTower decaying_to_cyclic(const FiniteDynamicalSystem& sys, const DecayingTower& tower) {
  check_shape(sys, tower);
  if (tower.levels.size() % 2 == 0) throw PreconditionError("decaying_to_cyclic: need 2m+1 levels");
  CyclicTower out;
  out.levels = tower.levels;
  out.first = -out.m();
  // The wraparound step is at most the two end norms.
  out.tolerance = tower.tolerance + sup_norm(tower.levels.front()) + sup_norm(tower.levels.back());
  return out;
}

} // namespace nucdim
