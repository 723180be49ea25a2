#include "nucdim/approx.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "nucdim/error.hpp"

namespace nucdim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_members(const FiniteDynamicalSystem& sys, const std::vector<CrossedElement>& F) {
  for (const auto& b : F)
    if (!b.host().same_host(sys)) throw PreconditionError("approximation: member of F lives over another system");
}

int support_k(const std::vector<CrossedElement>& F) {
  int k = 1;
  for (const auto& b : F) k = std::max(k, b.support_radius());
  return k;
}

double min_eigenvalue(const Matrix& h) {
  if (h.size() == 0) return 0.0;
  const Matrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double double_at(const TowerFamily& t, std::size_t l, int j, PointIndex x) { return to_double(t.value(l, j, x)); }

} // namespace

// ---- parameters ----

ApproxParams derive_params(const FiniteDynamicalSystem& sys, const std::vector<CrossedElement>& F, double epsilon,
                           const ApproxOptions& opts) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw PreconditionError("epsilon must be positive and finite");
  check_members(sys, F);
  ApproxParams p;
  p.epsilon = epsilon;
  p.d = opts.d.value_or(sys.declared_dim());
  if (p.d < 0) throw PreconditionError("dimension d must be nonnegative");
  p.k = support_k(F);

  for (std::size_t i = 0; i < F.size(); ++i) {
    const NormResult r = norm(F[i], opts.norm);
    p.member_norms.push_back(r.upper());
    if (r.value > 1.0 + opts.norm.tol)
      throw PreconditionError("member " + std::to_string(i) + " of F has norm " + std::to_string(r.value) +
                              " > 1");
  }

  const double ratio = epsilon / (2.0 * p.k + 1.0);
  p.epsilon_prime = ratio * ratio;
  p.ceil_inverse_epsilon_prime = ceil_inverse(p.epsilon_prime);
  const std::int64_t m = static_cast<std::int64_t>(2 * p.d + 3) * p.k * p.ceil_inverse_epsilon_prime;
  if (m > INT_MAX / 8) throw PreconditionError("approximation: m = " + std::to_string(m) + " is too large");
  p.m = static_cast<int>(m);
  p.N_formula = static_cast<std::size_t>(p.d + 1) * static_cast<std::size_t>(4 * m + 1);
  p.N = opts.N.value_or(p.N_formula);
  p.split = invariant_split(sys, p.N);
  const auto& cycles = sys.orbits().cycles;
  for (std::size_t c : p.split.long_cycles)
    if (cycles[c].length() <= p.N_formula)
      throw PreconditionError("approximation: cycle of length " + std::to_string(cycles[c].length()) +
                              " lies in the complement but needs length > " + std::to_string(p.N_formula) +
                              "; smallest admissible N' = " + std::to_string(p.N_formula));
  p.ideal_path_active = !p.split.long_cycles.empty();
  return p;
}

// ---- quasicentral element ----

CrossedElement sqrt_function(const FiniteDynamicalSystem& sys, const std::vector<double>& e, bool complement) {
  Function f(sys.size());
  for (PointIndex x = 0; x < sys.size(); ++x) f[x] = std::sqrt(complement ? 1.0 - e.at(x) : e.at(x));
  return CrossedElement::function(sys, std::move(f));
}

CrossedElement compress(const CrossedElement& b, const std::vector<double>& e, bool complement) {
  const CrossedElement s = sqrt_function(b.host(), e, complement);
  return mul(mul(s, b), s);
}

QuasicentralUnit quasicentral_unit(const FiniteDynamicalSystem& sys, const InvariantSplit& split,
                                   const std::vector<CrossedElement>& F,
                                   const std::optional<std::vector<double>>& supplied, const NormOptions& norm_opts) {
  QuasicentralUnit q;
  if (supplied) {
    if (supplied->size() != sys.size()) throw PreconditionError("supplied e must have one value per point");
    for (PointIndex x = 0; x < sys.size(); ++x) {
      const double v = (*supplied)[x];
      if (!(v >= 0.0 && v <= 1.0)) throw PreconditionError("supplied e takes a value outside [0,1]");
      if (v != 0.0 && !contains(split.long_part, x))
        throw PreconditionError("supplied e is not supported in the complement of Y");
    }
    q.e = *supplied;
    q.supplied = true;
  } else {
    q.e.assign(sys.size(), 0.0);
    for (PointIndex x : split.long_part) q.e[x] = 1.0;
  }
  q.central = true;
  for (PointIndex x = 0; x < sys.size(); ++x) {
    const double v = q.e[x];
    if ((v != 0.0 && v != 1.0) || q.e[sys.forward(x)] != v) q.central = false;
  }
  const CrossedElement E = CrossedElement::function(sys, Function(q.e.begin(), q.e.end()));
  for (const auto& b : F) {
    q.commutator.push_back(norm(mul(E, b) - mul(b, E), norm_opts).upper());
    const CrossedElement split_err = compress(b, q.e, false) + compress(b, q.e, true) - b;
    q.splitting.push_back(norm(split_err, norm_opts).upper());
  }
  return q;
}

// ---- quotient side ----

std::size_t quotient_samples(std::size_t L, int k, double epsilon) {
  const double raw = kTwoPi * static_cast<double>(L) * k / epsilon;
  auto s = static_cast<std::size_t>(std::ceil(raw - 1e-9 * raw));
  if (s % 2 == 1) ++s;
  return std::max<std::size_t>(s, 2);
}

QuotientPieces::QuotientPieces(FiniteDynamicalSystem host, std::vector<std::size_t> cycles, int k, double epsilon,
                               std::size_t declared_summands)
    : host_(std::move(host)), cycles_(std::move(cycles)), k_(k), epsilon_(epsilon), declared_(declared_summands) {
  for (std::size_t c : cycles_) samples_.push_back(quotient_samples(host_.orbits().cycles.at(c).length(), k_, epsilon_));
}

std::optional<std::size_t> QuotientPieces::slot_of(std::size_t cycle) const {
  auto it = std::find(cycles_.begin(), cycles_.end(), cycle);
  if (it == cycles_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - cycles_.begin());
}

QuotientPieces::Image QuotientPieces::psi(const CrossedElement& b) const {
  Image out;
  for (std::size_t slot = 0; slot < cycles_.size(); ++slot) {
    const auto coeffs = OrbitCoefficients::of(b, cycles_[slot]);
    const std::size_t s = samples_[slot];
    std::vector<Matrix> mats;
    mats.reserve(s);
    for (std::size_t j = 0; j < s; ++j)
      mats.push_back(coeffs.matrix(std::polar(1.0, kTwoPi * static_cast<double>(j) / static_cast<double>(s))));
    out.push_back(std::move(mats));
  }
  return out;
}

Matrix QuotientPieces::phi_at(const Image& a, std::size_t slot, double theta, int colour) const {
  const std::size_t s = samples_.at(slot);
  const auto& mats = a.at(slot);
  const double x = std::fmod(std::fmod(theta, kTwoPi) + kTwoPi, kTwoPi) * static_cast<double>(s) / kTwoPi;
  const double fl = std::floor(x);
  const std::size_t j0 = static_cast<std::size_t>(fl) % s;
  const std::size_t j1 = (j0 + 1) % s;
  const double frac = x - fl;
  const auto keep = [&](std::size_t j) { return colour < 0 || static_cast<int>(j % 2) == colour; };
  Matrix out = Matrix::Zero(mats[j0].rows(), mats[j0].cols());
  if (keep(j0)) out += (1.0 - frac) * mats[j0];
  if (keep(j1)) out += frac * mats[j1];
  return out;
}

double QuotientPieces::phi_lipschitz(const Image& a, std::size_t slot, int colour) const {
  const std::size_t s = samples_.at(slot);
  const auto& mats = a.at(slot);
  const auto keep = [&](std::size_t j) { return colour < 0 || static_cast<int>(j % 2) == colour; };
  double lip = 0.0;
  for (std::size_t j = 0; j < s; ++j) {
    const std::size_t n = (j + 1) % s;
    Matrix diff = Matrix::Zero(mats[j].rows(), mats[j].cols());
    if (keep(n)) diff += mats[n];
    if (keep(j)) diff -= mats[j];
    lip = std::max(lip, spectral_norm(diff));
  }
  return lip * static_cast<double>(s) / kTwoPi;
}

FiberCorrection QuotientPieces::phi(Image a, int colour) const {
  auto self = std::make_shared<const QuotientPieces>(*this);
  auto img = std::make_shared<const Image>(std::move(a));
  auto lips = std::make_shared<std::vector<double>>();
  for (std::size_t slot = 0; slot < cycles_.size(); ++slot) lips->push_back(phi_lipschitz(*img, slot, colour));
  FiberCorrection c;
  c.active = [self](std::size_t cycle) { return self->slot_of(cycle).has_value(); };
  c.evaluate = [self, img, colour](std::size_t cycle, double theta) {
    return self->phi_at(*img, *self->slot_of(cycle), theta, colour);
  };
  c.lipschitz = [self, lips](std::size_t cycle) { return lips->at(*self->slot_of(cycle)); };
  return c;
}

double QuotientPieces::order_zero_residual(int colour, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  double worst = 0.0;
  for (std::size_t slot = 0; slot < cycles_.size(); ++slot) {
    const std::size_t s = samples_[slot];
    const auto L = static_cast<Eigen::Index>(host_.orbits().cycles[cycles_[slot]].length());
    const auto random_vec = [&] {
      Vector v(L);
      for (Eigen::Index i = 0; i < L; ++i) v(i) = Complex(gauss(rng), gauss(rng));
      return Vector(v.normalized());
    };
    Image a(cycles_.size()), b(cycles_.size());
    for (std::size_t t = 0; t < cycles_.size(); ++t) {
      const auto Lt = static_cast<Eigen::Index>(host_.orbits().cycles[cycles_[t]].length());
      a[t].assign(samples_[t], Matrix::Zero(Lt, Lt));
      b[t].assign(samples_[t], Matrix::Zero(Lt, Lt));
    }
    const auto j1 = static_cast<std::size_t>(colour);
    const Vector v = random_vec();
    const Matrix P = v * v.adjoint();
    a[slot][j1] = P;
    b[slot][j1] = Matrix::Identity(L, L) - P;
    if (s >= 4) {
      const Vector w = random_vec();
      b[slot][j1 + 2] = w * w.adjoint();
    }
    for (std::size_t g = 0; g < 8 * s; ++g) {
      const double theta = kTwoPi * static_cast<double>(g) / static_cast<double>(8 * s);
      worst = std::max(worst, spectral_norm(phi_at(a, slot, theta, colour) * phi_at(b, slot, theta, colour)));
    }
  }
  return worst;
}

QuotientPieces quotient_approx(const FiniteDynamicalSystem& sys, const InvariantSplit& split, int k, double epsilon,
                               int d) {
  if (!(epsilon > 0.0)) throw PreconditionError("quotient_approx: epsilon must be positive");
  return QuotientPieces(sys, split.short_cycles, std::max(k, 1), epsilon, static_cast<std::size_t>(d + 2));
}

// ---- ideal side ----

Matrix BlockFunction::dense(std::size_t z) const {
  const Eigen::Index n = 2 * m + 1;
  Matrix out = Matrix::Zero(n, n);
  for (const auto& [ab, v] : at_point.at(z)) out(ab.first + m, ab.second + m) += v;
  return out;
}

BlockFunction block_product(const BlockFunction& x, const BlockFunction& y) {
  if (x.m != y.m || x.at_point.size() != y.at_point.size())
    throw PreconditionError("block_product: shapes differ");
  BlockFunction out;
  out.m = x.m;
  out.at_point.resize(x.at_point.size());
  for (std::size_t z = 0; z < x.at_point.size(); ++z) {
    const auto& Y = y.at_point[z];
    for (const auto& [ab, v] : x.at_point[z])
      for (auto it = Y.lower_bound({ab.second, INT_MIN}); it != Y.end() && it->first.first == ab.second; ++it)
        out.at_point[z][{ab.first, it->first.second}] += v * it->second;
  }
  return out;
}

BlockFunction block_adjoint(const BlockFunction& x) {
  BlockFunction out;
  out.m = x.m;
  out.at_point.resize(x.at_point.size());
  for (std::size_t z = 0; z < x.at_point.size(); ++z)
    for (const auto& [ab, v] : x.at_point[z]) out.at_point[z][{ab.second, ab.first}] += std::conj(v);
  return out;
}

IdealPieces::IdealPieces(FiniteDynamicalSystem host, TowerFamily towers)
    : host_(std::move(host)), towers_(std::move(towers)) {
  const int m = towers_.m;
  for (std::size_t l = 0; l < towers_.supports.supports.size(); ++l) {
    const auto& Zl = towers_.supports.supports[l];
    Z_.emplace_back(Zl.begin(), Zl.end());
    std::vector<std::vector<double>> rows;
    for (int j = -m; j <= m; ++j) {
      std::vector<double> row;
      for (PointIndex z : Z_.back()) row.push_back(std::sqrt(double_at(towers_, l, j, host_.shift(z, j))));
      rows.push_back(std::move(row));
    }
    sqrt_mu_.push_back(std::move(rows));
  }
}

double IdealPieces::sqrt_mu(std::size_t l, int j, std::size_t zi) const {
  const int m = towers_.m;
  if (j < -m || j > m) return 0.0;
  return sqrt_mu_.at(l).at(static_cast<std::size_t>(j + m)).at(zi);
}

// Entry (j, j-i) at z: sqrt(mu_j)(forward^j z) c_i(forward^j z) sqrt(mu_{j-i})(forward^{j-i} z).
BlockFunction IdealPieces::psi(std::size_t l, const CrossedElement& c) const {
  const int m = towers_.m;
  BlockFunction H;
  H.m = m;
  H.at_point.resize(Z_.at(l).size());
  for (std::size_t zi = 0; zi < Z_[l].size(); ++zi) {
    const PointIndex z = Z_[l][zi];
    for (const auto& [i, g] : c.coefficients())
      for (int j = std::max(-m, -m + i); j <= std::min(m, m + i); ++j) {
        const Complex v = sqrt_mu(l, j, zi) * g[host_.shift(z, j)] * sqrt_mu(l, j - i, zi);
        if (v != Complex(0.0)) H.at_point[zi][{j, j - i}] += v;
      }
  }
  return H;
}

CrossedElement IdealPieces::phi(std::size_t l, const BlockFunction& H) const {
  if (H.m != towers_.m || H.at_point.size() != Z_.at(l).size())
    throw PreconditionError("ideal phi: block function has the wrong shape");
  std::map<int, Function> acc;
  for (std::size_t zi = 0; zi < Z_[l].size(); ++zi)
    for (const auto& [ab, v] : H.at_point[zi]) {
      auto [it, fresh] = acc.try_emplace(ab.first - ab.second, host_.size(), 0.0);
      it->second[host_.shift(Z_[l][zi], ab.first)] += v;
    }
  CrossedElement out(host_);
  for (auto& [p, f] : acc) out.set_coefficient(p, std::move(f));
  return out;
}

CrossedElement IdealPieces::phi_psi(const CrossedElement& c) const {
  CrossedElement out(host_);
  for (std::size_t l = 0; l < Z_.size(); ++l) out += phi(l, psi(l, c));
  return out;
}

std::pair<double, double> IdealPieces::homomorphism_residuals(std::uint64_t seed, int trials) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const int m = towers_.m;
  std::uniform_int_distribution<int> index(-m, m);
  double mult = 0.0, adj = 0.0;
  for (std::size_t l = 0; l < Z_.size(); ++l) {
    if (Z_[l].empty()) continue;
    const std::size_t nz = Z_[l].size();
    // A sum of a few random matrix units with random coefficient functions on Z.
    const auto random_block = [&](std::optional<int> row) {
      BlockFunction H;
      H.m = m;
      H.at_point.resize(nz);
      for (int t = 0; t < 3; ++t) {
        const int a = (t == 0 && row) ? *row : index(rng);
        const int b = index(rng);
        for (std::size_t zi = 0; zi < nz; ++zi) H.at_point[zi][{a, b}] += Complex(gauss(rng), gauss(rng));
      }
      return H;
    };
    for (int t = 0; t < trials; ++t) {
      const BlockFunction X = random_block(std::nullopt);
      // Share an index with X half of the time so the product is nonzero.
      const std::optional<int> link =
          (t % 2 == 0) ? std::optional<int>(X.at_point[0].begin()->first.second) : std::nullopt;
      const BlockFunction Y = random_block(link);
      mult = std::max(mult, coefficient_bound(phi(l, block_product(X, Y)) - mul(phi(l, X), phi(l, Y))));
      adj = std::max(adj, coefficient_bound(phi(l, block_adjoint(X)) - adjoint(phi(l, X))));
    }
  }
  return {mult, adj};
}

double IdealPieces::sqrt_step(int k) const {
  const int m = towers_.m;
  double worst = 0.0;
  for (std::size_t l = 0; l < Z_.size(); ++l) {
    const auto& level = towers_.levels[l];
    const auto support_of = [&](int j) {
      auto it = level.find(j);
      return it == level.end() ? PointSet{} : it->second.support();
    };
    for (int j = -m - k; j <= m + k; ++j)
      for (int i = -k; i <= k; ++i) {
        PointSet pts = support_of(j);
        PointSet moved;
        for (PointIndex y : support_of(j - i)) moved.push_back(host_.shift(y, i));
        std::sort(moved.begin(), moved.end());
        pts = set_union(pts, moved);
        for (PointIndex x : pts) {
          const double a = std::sqrt(double_at(towers_, l, j - i, host_.shift(x, -i)));
          const double b = std::sqrt(double_at(towers_, l, j, x));
          worst = std::max(worst, std::abs(a - b));
        }
      }
  }
  return worst;
}

TowerFamily ideal_towers(const FiniteDynamicalSystem& sys, const ApproxParams& params, const std::vector<double>& e) {
  PointSet K;
  for (PointIndex x = 0; x < sys.size(); ++x)
    if (e.at(x) > 0.0) K.push_back(x);
  return build_tower_family(sys, K, params.d, params.k, params.m, params.epsilon_prime);
}

IdealPieces ideal_approx(const FiniteDynamicalSystem& sys, const ApproxParams& params, TowerFamily towers) {
  if (towers.m != params.m || towers.d != params.d || towers.k != params.k ||
      towers.supports.supports.size() != static_cast<std::size_t>(2 * params.d + 3) ||
      towers.levels.size() != towers.supports.supports.size())
    throw PreconditionError("ideal_approx: tower family does not match the parameters");
  return IdealPieces(sys, std::move(towers));
}

double coefficient_bound(const CrossedElement& a) {
  double s = 0.0;
  for (const auto& [i, f] : a.coefficients()) s += sup_norm(f);
  return s;
}

// ---- claims ----

namespace {

ClaimMeasure measure(const std::vector<FiberSection>& residuals, double bound, const NormOptions& opts) {
  ClaimMeasure c;
  c.bound = bound + opts.tol;
  for (const auto& r : residuals) {
    const double v = norm(r, opts).upper();
    c.per_member.push_back(v);
    c.max = std::max(c.max, v);
  }
  return c;
}

FiberSection quotient_residual(const QuotientPieces& q, const CrossedElement& target, const CrossedElement& input) {
  FiberSection s{CrossedElement::zero(target.host()) - target, std::nullopt};
  if (!q.cycles().empty()) s.correction = q.phi(q.psi(input));
  return s;
}

} // namespace

ClaimMeasure verify_quotient(const QuotientPieces& q, const std::vector<CrossedElement>& F,
                             const NormOptions& norm_opts) {
  std::vector<FiberSection> res;
  const PointSet Y = cycle_points(q.host(), q.cycles());
  for (const auto& b : F) res.push_back(quotient_residual(q, b.restricted_to(Y), b));
  return measure(res, q.epsilon(), norm_opts);
}

ClaimMeasure verify_claim1(const QuotientPieces& q, const std::vector<CrossedElement>& F, const std::vector<double>& e,
                           int d, double epsilon, const NormOptions& norm_opts) {
  std::vector<FiberSection> res;
  for (const auto& b : F) {
    const CrossedElement c = compress(b, e, true);
    res.push_back(quotient_residual(q, c, c));
  }
  return measure(res, (d + 3) * epsilon, norm_opts);
}

ClaimMeasure verify_claim2(const IdealPieces* ideal, const std::vector<CrossedElement>& F,
                           const std::vector<double>& e, int d, double epsilon, const NormOptions& norm_opts) {
  std::vector<FiberSection> res;
  for (const auto& b : F) {
    const CrossedElement c = compress(b, e, false);
    CrossedElement r = ideal ? ideal->phi_psi(c) - c : CrossedElement::zero(b.host()) - c;
    res.push_back({std::move(r), std::nullopt});
  }
  return measure(res, (2 * d + 3) * epsilon, norm_opts);
}

ClaimMeasure assemble_and_verify(const QuotientPieces& q, const IdealPieces* ideal,
                                 const std::vector<CrossedElement>& F, const std::vector<double>& e, int d,
                                 double epsilon, const NormOptions& norm_opts) {
  std::vector<FiberSection> res;
  for (const auto& b : F) {
    const CrossedElement c1 = compress(b, e, true);
    const CrossedElement c2 = compress(b, e, false);
    CrossedElement crossed = CrossedElement::zero(b.host()) - b;
    if (ideal) crossed += ideal->phi_psi(c2);
    FiberSection s{std::move(crossed), std::nullopt};
    if (!q.cycles().empty()) s.correction = q.phi(q.psi(c1));
    res.push_back(std::move(s));
  }
  return measure(res, (3 * d + 7) * epsilon, norm_opts);
}

DimensionLedger dimension_ledger(int d) {
  if (d < 0) throw PreconditionError("dimension_ledger: d must be nonnegative");
  DimensionLedger L;
  L.d = d;
  L.quotient_term = d + 2;
  L.ideal_term_declared = (d + 1) * (2 * d + 3);
  L.ideal_term_actual = 2 * d + 3;
  L.ledger_total = L.quotient_term + L.ideal_term_declared;
  L.theorem_bound = 2 * d * d + 6 * d + 4;
  L.actual_total = L.quotient_term + L.ideal_term_actual;
  L.summand_count = 3 * d + 5;
  L.remark_d1 = d + 1;
  L.remark_d2 = 2 * d + 2;
  L.remark_total = L.remark_d1 + L.remark_d2 + 1;
  L.consistent = L.ledger_total == L.theorem_bound + 1 && L.ledger_total == 2 * d * d + 6 * d + 5 &&
                 L.summand_count == L.actual_total && L.remark_total == L.summand_count - 1;
  return L;
}

bool ApproxReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const AssertionRow& r) { return r.pass; });
}

ApproxReport run_approximation(const FiniteDynamicalSystem& sys, const std::vector<CrossedElement>& F, double epsilon,
                               const ApproxOptions& opts) {
  ApproxReport rep;
  rep.params = derive_params(sys, F, epsilon, opts);
  const ApproxParams& p = rep.params;
  const NormOptions& nopts = opts.norm;
  rep.unit = quasicentral_unit(sys, p.split, F, opts.e, nopts);
  const std::vector<double>& e = rep.unit.e;
  rep.ledger = dimension_ledger(p.d);

  const QuotientPieces q = quotient_approx(sys, p.split, p.k, epsilon, p.d);
  rep.quotient_cycles = q.cycles();
  for (std::size_t s = 0; s < q.cycles().size(); ++s) rep.quotient_samples.push_back(q.samples(s));

  std::optional<IdealPieces> ideal;
  const bool ideal_needed = std::any_of(e.begin(), e.end(), [](double v) { return v > 0.0; });
  if (ideal_needed) {
    ideal.emplace(ideal_approx(sys, p, ideal_towers(sys, p, e)));
    rep.towers = verify_tower(sys, ideal->towers());
    rep.tower_count = ideal->tower_count();
    rep.sqrt_step = ideal->sqrt_step(p.k);
  }
  rep.sqrt_step_bound = epsilon / (2.0 * p.k + 1.0);
  const IdealPieces* ip = ideal ? &*ideal : nullptr;

  rep.quotient = verify_quotient(q, F, nopts);
  rep.claim1 = verify_claim1(q, F, e, p.d, epsilon, nopts);
  rep.claim2 = verify_claim2(ip, F, e, p.d, epsilon, nopts);
  rep.final_error = assemble_and_verify(q, ip, F, e, p.d, epsilon, nopts);
  rep.summand_count = q.summands_declared() + (ideal ? rep.tower_count : 0);

  if (opts.structural_checks) {
    StructuralChecks& c = rep.checks;
    c.ran = true;
    for (std::size_t bi = 0; bi < F.size(); ++bi) {
      const CrossedElement& b = F[bi];
      const CrossedElement bb = mul(adjoint(b), b);
      const double b_norm = p.member_norms[bi];
      const auto img = q.psi(b);
      const auto img_bb = q.psi(bb);
      for (std::size_t slot = 0; slot < img.size(); ++slot)
        for (std::size_t j = 0; j < img[slot].size(); ++j) {
          c.min_psd_eigenvalue = std::min(c.min_psd_eigenvalue, min_eigenvalue(img_bb[slot][j]));
          c.contractivity_excess = std::max(c.contractivity_excess, spectral_norm(img[slot][j]) - b_norm);
        }
      if (ip)
        for (std::size_t l = 0; l < ip->tower_count(); ++l) {
          const BlockFunction H = ip->psi(l, b);
          const BlockFunction Hbb = ip->psi(l, bb);
          for (std::size_t zi = 0; zi < H.at_point.size(); ++zi) {
            c.min_psd_eigenvalue = std::min(c.min_psd_eigenvalue, min_eigenvalue(Hbb.dense(zi)));
            c.contractivity_excess = std::max(c.contractivity_excess, spectral_norm(H.dense(zi)) - b_norm);
          }
        }
    }
    if (ip) std::tie(c.multiplicativity, c.adjoint) = ip->homomorphism_residuals(opts.seed, 4);
    if (!q.cycles().empty())
      c.order_zero = std::max(q.order_zero_residual(0, opts.seed), q.order_zero_residual(1, opts.seed + 1));
  }

  auto& rows = rep.assertions;
  const auto add = [&](std::string name, double measured, double bound) {
    rows.push_back({std::move(name), measured, bound, measured <= bound});
  };
  add("quotient_error", rep.quotient.max, rep.quotient.bound);
  add("claim1", rep.claim1.max, rep.claim1.bound);
  add("claim2", rep.claim2.max, rep.claim2.bound);
  add("final_error", rep.final_error.max, rep.final_error.bound);
  if (rep.towers) {
    add("tower_step", rep.towers->max_step_float, to_double(rep.towers->step_bound));
    add("tower_sum_deviation", rep.towers->max_sum_deviation_float, 1e-12);
    rows.push_back({"tower_conditions", rep.towers->passed() ? 0.0 : 1.0, 0.0, rep.towers->passed()});
    rows.push_back({"sqrt_step", rep.sqrt_step, rep.sqrt_step_bound, rep.sqrt_step < rep.sqrt_step_bound});
  }
  if (rep.checks.ran) {
    add("psd_min_eigenvalue", -rep.checks.min_psd_eigenvalue, 1e-10);
    add("contractivity_excess", rep.checks.contractivity_excess, nopts.tol);
    if (ip) {
      add("multiplicativity", rep.checks.multiplicativity, 1e-10);
      add("adjoint", rep.checks.adjoint, 1e-10);
    }
    if (!q.cycles().empty()) add("order_zero", rep.checks.order_zero, 1e-10);
  }
  const double expected = static_cast<double>(ideal ? rep.ledger.summand_count : rep.ledger.quotient_term);
  rows.push_back({"summand_count", static_cast<double>(rep.summand_count), expected,
                  static_cast<double>(rep.summand_count) == expected});
  rows.push_back({"ledger_consistent", rep.ledger.consistent ? 0.0 : 1.0, 0.0, rep.ledger.consistent});
  return rep;
}

} // namespace nucdim
