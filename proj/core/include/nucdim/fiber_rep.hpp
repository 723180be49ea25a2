#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nucdim/crossed_element.hpp"

namespace nucdim {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// The coefficients of an element restricted to one cycle, in the basis order of the
// orbit representation: basis vector r sits at forward^{-r}(base).
struct OrbitCoefficients {
  std::size_t length = 0;
  std::vector<std::pair<int, Vector>> terms;

  static OrbitCoefficients of(const CrossedElement& a, std::size_t cycle);

  Matrix matrix(Complex lambda) const;
  Vector apply(Complex lambda, const Vector& v) const;
  Vector apply_adjoint(Complex lambda, const Vector& v) const;

  // Lipschitz constants of theta -> norm at e^{i theta}: after a diagonal gauge, and entrywise.
  double lipschitz_gauge() const;
  double lipschitz_entries() const;
};

// pi_{y,lambda}: f -> diag(f(y), f(forward^{-1} y), ...), u -> w_lambda (ones on the
// superdiagonal, lambda in the bottom-left corner).
class OrbitFiberRep {
public:
  OrbitFiberRep(FiniteDynamicalSystem sys, std::size_t cycle, Complex lambda);

  std::size_t dimension() const { return points_.size(); }
  std::size_t cycle() const { return cycle_; }
  Complex lambda() const { return lambda_; }
  PointIndex basis_point(std::size_t r) const { return points_.at(r); }

  Matrix of_function(const Function& f) const;
  Matrix of_unitary(int power) const;
  Matrix operator()(const CrossedElement& a) const;

private:
  FiniteDynamicalSystem sys_;
  std::size_t cycle_;
  Complex lambda_;
  std::vector<PointIndex> points_;
};

// Throws PreconditionError unless |lambda| = 1 within 1e-12.
OrbitFiberRep orbit_rep(const FiniteDynamicalSystem& sys, std::size_t cycle, Complex lambda);

// Matrix-valued samples over G equispaced roots of unity and their Fourier inversion.
class OrbitIsomorphism {
public:
  // grid must be a power of two.
  OrbitIsomorphism(FiniteDynamicalSystem sys, std::size_t cycle, std::size_t grid);

  std::size_t grid() const { return grid_; }
  Complex grid_point(std::size_t g) const;
  // Largest support radius that inverts without aliasing: (grid - L) / 2.
  int max_radius() const;

  std::vector<Matrix> forward(const CrossedElement& a) const;
  // Element supported on this cycle whose samples are the given matrices.
  CrossedElement inverse(std::span<const Matrix> samples) const;

private:
  FiniteDynamicalSystem sys_;
  std::size_t cycle_;
  std::size_t grid_;
};

// (-1)^{k+1} det(v) for v with unit entries on the superdiagonal and bottom-left corner only.
Complex holonomy_lambda(const Matrix& u_image);
Complex holonomy_lambda(const OrbitFiberRep& rep);

} // namespace nucdim
