#pragma once

#include <map>

#include "nucdim/dynsys.hpp"
#include "nucdim/types.hpp"

namespace nucdim {

// A finite Laurent series sum_i f_i u^i over a host system, with u g u* = g o forward^{-1}.
class CrossedElement {
public:
  explicit CrossedElement(FiniteDynamicalSystem host);

  static CrossedElement zero(const FiniteDynamicalSystem& host);
  static CrossedElement identity(const FiniteDynamicalSystem& host);
  static CrossedElement unitary_power(const FiniteDynamicalSystem& host, int power);
  static CrossedElement function(const FiniteDynamicalSystem& host, Function f);
  static CrossedElement monomial(const FiniteDynamicalSystem& host, Function f, int power);

  const FiniteDynamicalSystem& host() const { return host_; }
  // Only nonzero coefficients are stored.
  const std::map<int, Function>& coefficients() const { return coeffs_; }
  Function coefficient(int power) const;
  void set_coefficient(int power, Function f);
  void add_to_coefficient(int power, const Function& f);

  int support_radius() const;
  bool is_zero() const { return coeffs_.empty(); }
  double coefficient_sup(int power) const;

  // Keeps only the coefficient values at the given points (left multiplication by an indicator).
  CrossedElement restricted_to(const PointSet& points) const;

  CrossedElement& operator+=(const CrossedElement& other);
  CrossedElement& operator-=(const CrossedElement& other);
  CrossedElement& operator*=(Complex scalar);

private:
  void check_host(const CrossedElement& other) const;
  void prune(int power);

  FiniteDynamicalSystem host_;
  std::map<int, Function> coeffs_;
};

CrossedElement operator+(CrossedElement a, const CrossedElement& b);
CrossedElement operator-(CrossedElement a, const CrossedElement& b);
CrossedElement operator*(Complex s, CrossedElement a);
CrossedElement operator*(const CrossedElement& a, const CrossedElement& b);

// (f u^i)(g u^j) = f (g o forward^{-i}) u^{i+j}
CrossedElement mul(const CrossedElement& a, const CrossedElement& b);
// (f u^i)* = (conj f o forward^{i}) u^{-i}
CrossedElement adjoint(const CrossedElement& a);
// The zeroth coefficient.
Function expectation(const CrossedElement& a);

// max_i sup_x |a_i(x) - b_i(x)|
double coefficient_distance(const CrossedElement& a, const CrossedElement& b);

Function constant_function(std::size_t n, Complex value);
Function indicator(std::size_t n, const PointSet& points);
double sup_norm(const Function& f);

} // namespace nucdim
