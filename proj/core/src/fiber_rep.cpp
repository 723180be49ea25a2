#include "nucdim/fiber_rep.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "nucdim/error.hpp"

namespace nucdim {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

std::vector<PointIndex> basis_points(const FiniteDynamicalSystem& sys, std::size_t cycle) {
  const auto& cyc = sys.orbits().cycles.at(cycle);
  const std::size_t L = cyc.length();
  std::vector<PointIndex> pts(L);
  for (std::size_t r = 0; r < L; ++r) pts[r] = cyc.points[(L - r) % L];
  return pts;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

} // namespace

OrbitCoefficients OrbitCoefficients::of(const CrossedElement& a, std::size_t cycle) {
  const auto pts = basis_points(a.host(), cycle);
  OrbitCoefficients out;
  out.length = pts.size();
  for (const auto& [i, f] : a.coefficients()) {
    Vector v(static_cast<Eigen::Index>(pts.size()));
    bool nonzero = false;
    for (std::size_t r = 0; r < pts.size(); ++r) {
      v(static_cast<Eigen::Index>(r)) = f[pts[r]];
      nonzero = nonzero || f[pts[r]] != Complex(0.0);
    }
    if (nonzero) out.terms.emplace_back(i, std::move(v));
  }
  return out;
}

// Entry (r, p) of phi(f) w^i is f(pt_r) lambda^{-q} where p - i = qL + r.
Matrix OrbitCoefficients::matrix(Complex lambda) const {
  const auto L = static_cast<std::int64_t>(length);
  Matrix M = Matrix::Zero(L, L);
  for (const auto& [i, f] : terms)
    for (std::int64_t r = 0; r < L; ++r) {
      const std::int64_t p = mod(r + i, L);
      const std::int64_t q = (p - i - r) / L;
      M(r, p) += f(r) * std::pow(lambda, static_cast<int>(-q));
    }
  return M;
}

Vector OrbitCoefficients::apply(Complex lambda, const Vector& v) const {
  const auto L = static_cast<std::int64_t>(length);
  Vector out = Vector::Zero(L);
  for (const auto& [i, f] : terms)
    for (std::int64_t r = 0; r < L; ++r) {
      const std::int64_t p = mod(r + i, L);
      const std::int64_t q = (p - i - r) / L;
      out(r) += f(r) * std::pow(lambda, static_cast<int>(-q)) * v(p);
    }
  return out;
}

Vector OrbitCoefficients::apply_adjoint(Complex lambda, const Vector& v) const {
  const auto L = static_cast<std::int64_t>(length);
  Vector out = Vector::Zero(L);
  for (const auto& [i, f] : terms)
    for (std::int64_t r = 0; r < L; ++r) {
      const std::int64_t p = mod(r + i, L);
      const std::int64_t q = (p - i - r) / L;
      out(p) += std::conj(f(r) * std::pow(lambda, static_cast<int>(-q))) * v(r);
    }
  return out;
}

double OrbitCoefficients::lipschitz_gauge() const {
  double s = 0.0;
  for (const auto& [i, f] : terms)
    s += f.cwiseAbs().maxCoeff() * std::abs(static_cast<double>(i)) / static_cast<double>(length);
  return s;
}

double OrbitCoefficients::lipschitz_entries() const {
  double s = 0.0;
  const auto L = static_cast<std::int64_t>(length);
  for (const auto& [i, f] : terms) {
    const std::int64_t a = std::abs(static_cast<std::int64_t>(i));
    s += f.cwiseAbs().maxCoeff() * static_cast<double>((a + L - 1) / L);
  }
  return s;
}

OrbitFiberRep::OrbitFiberRep(FiniteDynamicalSystem sys, std::size_t cycle, Complex lambda)
    : sys_(std::move(sys)), cycle_(cycle), lambda_(lambda), points_(basis_points(sys_, cycle)) {}

Matrix OrbitFiberRep::of_function(const Function& f) const {
  return (*this)(CrossedElement::function(sys_, f));
}

Matrix OrbitFiberRep::of_unitary(int power) const {
  return (*this)(CrossedElement::unitary_power(sys_, power));
}

Matrix OrbitFiberRep::operator()(const CrossedElement& a) const {
  if (!a.host().same_host(sys_)) throw PreconditionError("orbit representation: element from another system");
  const auto L = static_cast<Eigen::Index>(points_.size());
  if (a.is_zero()) return Matrix::Zero(L, L);
  return OrbitCoefficients::of(a, cycle_).matrix(lambda_);
}

OrbitFiberRep orbit_rep(const FiniteDynamicalSystem& sys, std::size_t cycle, Complex lambda) {
  if (std::abs(std::abs(lambda) - 1.0) > 1e-12) throw PreconditionError("orbit_rep: lambda is off the unit circle");
  if (cycle >= sys.orbits().cycles.size()) throw PreconditionError("orbit_rep: no such cycle");
  return OrbitFiberRep(sys, cycle, lambda);
}

OrbitIsomorphism::OrbitIsomorphism(FiniteDynamicalSystem sys, std::size_t cycle, std::size_t grid)
    : sys_(std::move(sys)), cycle_(cycle), grid_(grid) {
  if (!is_power_of_two(grid)) throw PreconditionError("orbit_iso: grid size must be a power of two");
  if (cycle >= sys_.orbits().cycles.size()) throw PreconditionError("orbit_iso: no such cycle");
}

Complex OrbitIsomorphism::grid_point(std::size_t g) const {
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(g) / static_cast<double>(grid_));
}

int OrbitIsomorphism::max_radius() const {
  const auto L = static_cast<std::int64_t>(sys_.orbits().cycles[cycle_].length());
  return static_cast<int>(std::max<std::int64_t>(-1, (static_cast<std::int64_t>(grid_) - L) / 2));
}

std::vector<Matrix> OrbitIsomorphism::forward(const CrossedElement& a) const {
  const std::size_t L = sys_.orbits().cycles[cycle_].length();
  if (grid_ < 2 * static_cast<std::size_t>(a.support_radius()) + L)
    throw PreconditionError("orbit_iso: grid " + std::to_string(grid_) + " aliases support radius " +
                            std::to_string(a.support_radius()) + " on a cycle of length " + std::to_string(L));
  const auto coeffs = OrbitCoefficients::of(a, cycle_);
  std::vector<Matrix> out;
  out.reserve(grid_);
  for (std::size_t g = 0; g < grid_; ++g) out.push_back(coeffs.matrix(grid_point(g)));
  return out;
}

CrossedElement OrbitIsomorphism::inverse(std::span<const Matrix> samples) const {
  if (samples.size() != grid_) throw PreconditionError("orbit_iso: expected one matrix per grid point");
  const auto pts = basis_points(sys_, cycle_);
  const auto L = static_cast<std::int64_t>(pts.size());
  const int R = max_radius();
  CrossedElement out(sys_);
  std::map<int, Function> coeffs;
  for (std::int64_t r = 0; r < L; ++r)
    for (int i = -R; i <= R; ++i) {
      const std::int64_t p = mod(r + i, L);
      const std::int64_t q = (p - i - r) / L;
      // The (r, p) entry is sum_q f_{p-r-qL}(pt_r) lambda^{-q}; pick out lambda^{-q}.
      Complex acc = 0.0;
      for (std::size_t g = 0; g < grid_; ++g) acc += samples[g](r, p) * std::pow(grid_point(g), static_cast<int>(q));
      acc /= static_cast<double>(grid_);
      auto [it, fresh] = coeffs.try_emplace(i, sys_.size(), 0.0);
      it->second[pts[static_cast<std::size_t>(r)]] = acc;
    }
  for (auto& [i, f] : coeffs) {
    // Discard round-off left at powers the element does not use.
    if (sup_norm(f) > 1e-12) out.set_coefficient(i, std::move(f));
  }
  return out;
}

Complex holonomy_lambda(const Matrix& v) {
  const Eigen::Index k = v.rows();
  if (k == 0 || v.cols() != k) throw PreconditionError("holonomy: need a nonempty square matrix");
  for (Eigen::Index r = 0; r < k; ++r)
    for (Eigen::Index c = 0; c < k; ++c) {
      const bool slot = (k == 1) || (c == r + 1) || (r == k - 1 && c == 0);
      const double mag = std::abs(v(r, c));
      if (slot ? std::abs(mag - 1.0) > 1e-12 : mag > 1e-12)
        throw PreconditionError("holonomy: u-image is not a weighted cyclic shift");
    }
  const Complex sign = (k % 2 == 1) ? 1.0 : -1.0; // (-1)^{k+1}
  return sign * v.determinant();
}

Complex holonomy_lambda(const OrbitFiberRep& rep) { return holonomy_lambda(rep.of_unitary(1)); }

} // namespace nucdim
