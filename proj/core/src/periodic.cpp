#include "nucdim/periodic.hpp"

#include <map>
#include <numbers>
#include <numeric>

#include "nucdim/error.hpp"
#include "nucdim/norm.hpp"

namespace nucdim {

PeriodicEmbedding::PeriodicEmbedding(FiniteDynamicalSystem sys, std::size_t period, std::size_t grid)
    : sys_(std::move(sys)), n_(period), grid_(grid) {
  if (n_ == 0) throw PreconditionError("periodic_embedding: period must be positive");
  if (grid_ == 0) throw PreconditionError("periodic_embedding: grid must be nonempty");
  for (const auto& c : sys_.orbits().cycles)
    if (n_ % c.length() != 0)
      throw PreconditionError("periodic_embedding: " + std::to_string(n_) + " is not a period (cycle of length " +
                              std::to_string(c.length()) + ")");
}

Complex PeriodicEmbedding::grid_point(std::size_t g) const {
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(g) / static_cast<double>(grid_));
}

Matrix PeriodicEmbedding::beta(const Function& f, PointIndex y) const {
  Matrix b = Matrix::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  for (std::size_t r = 0; r < n_; ++r)
    b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)) = f.at(sys_.shift(y, -static_cast<std::int64_t>(r)));
  return b;
}

Matrix PeriodicEmbedding::u_matrix(Complex z) const {
  const auto n = static_cast<Eigen::Index>(n_);
  Matrix u = Matrix::Zero(n, n);
  for (Eigen::Index r = 0; r + 1 < n; ++r) u(r, r + 1) = 1.0;
  u(n - 1, 0) += z;
  return u;
}

Matrix PeriodicEmbedding::evaluate(const CrossedElement& a, PointIndex y, Complex z) const {
  const auto n = static_cast<Eigen::Index>(n_);
  const Matrix u = u_matrix(z);
  const Matrix u_inv = u.adjoint();
  Matrix out = Matrix::Zero(n, n);
  for (const auto& [i, f] : a.coefficients()) {
    Matrix p = Matrix::Identity(n, n);
    for (int s = 0; s < std::abs(i); ++s) p = p * (i > 0 ? u : u_inv);
    out += beta(f, y) * p;
  }
  return out;
}

double PeriodicEmbedding::unitarity_residual() const {
  const auto n = static_cast<Eigen::Index>(n_);
  double r = 0.0;
  for (std::size_t g = 0; g < grid_; ++g) {
    const Matrix u = u_matrix(grid_point(g));
    r = std::max(r, spectral_norm(u * u.adjoint() - Matrix::Identity(n, n)));
  }
  return r;
}

double PeriodicEmbedding::covariance_residual(const Function& f) const {
  Function moved(f.size());
  for (PointIndex x = 0; x < sys_.size(); ++x) moved[x] = f[sys_.backward(x)];
  double r = 0.0;
  for (PointIndex y = 0; y < sys_.size(); ++y) {
    const Matrix bf = beta(f, y), bm = beta(moved, y);
    for (std::size_t g = 0; g < grid_; ++g) {
      const Matrix u = u_matrix(grid_point(g));
      r = std::max(r, spectral_norm(u * bf * u.adjoint() - bm));
    }
  }
  return r;
}

Matrix PeriodicEmbedding::diagonal_average(const CrossedElement& a, PointIndex y) const {
  const auto n = static_cast<Eigen::Index>(n_);
  Matrix acc = Matrix::Zero(n, n);
  for (std::size_t g = 0; g < grid_; ++g) acc += evaluate(a, y, grid_point(g));
  acc /= static_cast<double>(grid_);
  Matrix diag = Matrix::Zero(n, n);
  diag.diagonal() = acc.diagonal();
  return diag;
}

double PeriodicEmbedding::commuting_square_residual(const CrossedElement& a) const {
  const Function e = expectation(a);
  double r = 0.0;
  for (PointIndex y = 0; y < sys_.size(); ++y) r = std::max(r, spectral_norm(diagonal_average(a, y) - beta(e, y)));
  return r;
}

double PeriodicEmbedding::round_trip_residual(const CrossedElement& a) const {
  double r = 0.0;
  for (const auto& [i, f] : a.coefficients()) {
    const CrossedElement shifted = mul(a, CrossedElement::unitary_power(sys_, -i));
    for (PointIndex y = 0; y < sys_.size(); ++y) {
      const Complex got = diagonal_average(shifted, y)(0, 0);
      r = std::max(r, std::abs(got - f[y]));
    }
  }
  return r;
}

PeriodicEmbedding periodic_embedding(const FiniteDynamicalSystem& sys, std::size_t period, std::size_t grid) {
  return PeriodicEmbedding(sys, period, grid);
}

std::size_t system_period(const FiniteDynamicalSystem& sys) {
  std::size_t n = 1;
  for (const auto& c : sys.orbits().cycles) n = std::lcm(n, c.length());
  return n;
}

PrimSpectrumReport prim_spectrum(const FiniteDynamicalSystem& sys) {
  std::map<std::size_t, PrimSpectrumReport::Stratum> by_k;
  for (const auto& c : sys.orbits().cycles) {
    auto& s = by_k[c.length()];
    s.k = c.length();
    ++s.orbit_count;
    s.point_count += c.length();
  }
  PrimSpectrumReport out;
  out.period = system_period(sys);
  for (auto& [k, s] : by_k) {
    s.description = "(Y_" + std::to_string(k) + "/Z) x T";
    out.max_irreducible_dimension = std::max(out.max_irreducible_dimension, k);
    out.strata.push_back(s);
  }
  return out;
}

} // namespace nucdim
