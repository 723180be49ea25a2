#pragma once

#include <string>
#include <vector>

#include "nucdim/fiber_rep.hpp"

namespace nucdim {

// beta(f) = diag(f, f o forward^{-1}, ..., f o forward^{-(n-1)}) evaluated at a point y,
// and the n x n shift u(z) with ones on the superdiagonal and z in the bottom-left corner.
class PeriodicEmbedding {
public:
  // Throws PreconditionError if forward^n is not the identity or the grid is empty.
  PeriodicEmbedding(FiniteDynamicalSystem sys, std::size_t period, std::size_t grid);

  const FiniteDynamicalSystem& system() const { return sys_; }
  std::size_t period() const { return n_; }
  std::size_t grid() const { return grid_; }
  Complex grid_point(std::size_t g) const;

  Matrix beta(const Function& f, PointIndex y) const;
  Matrix u_matrix(Complex z) const;
  // sum_i beta(f_i)(y) u(z)^i
  Matrix evaluate(const CrossedElement& a, PointIndex y, Complex z) const;

  // max over sampled z of ||u u* - 1||.
  double unitarity_residual() const;
  // max over points and sampled z of ||u beta(f) u* - beta(f o forward^{-1})||.
  double covariance_residual(const Function& f) const;
  // Grid average of the diagonal part against beta of the zeroth coefficient.
  double commuting_square_residual(const CrossedElement& a) const;
  // Coefficients recovered through the diagonal average of a u^{-i}.
  double round_trip_residual(const CrossedElement& a) const;

private:
  Matrix diagonal_average(const CrossedElement& a, PointIndex y) const;

  FiniteDynamicalSystem sys_;
  std::size_t n_;
  std::size_t grid_;
};

PeriodicEmbedding periodic_embedding(const FiniteDynamicalSystem& sys, std::size_t period, std::size_t grid);

// Smallest n >= 1 with forward^n = identity: the lcm of the cycle lengths.
std::size_t system_period(const FiniteDynamicalSystem& sys);

struct PrimSpectrumReport {
  struct Stratum {
    std::size_t k = 0;
    std::size_t orbit_count = 0;
    std::size_t point_count = 0;
    std::string description;
  };
  std::vector<Stratum> strata;
  std::size_t period = 1;
  std::size_t max_irreducible_dimension = 0;
};

PrimSpectrumReport prim_spectrum(const FiniteDynamicalSystem& sys);

} // namespace nucdim
