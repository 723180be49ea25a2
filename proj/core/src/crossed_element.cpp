#include "nucdim/crossed_element.hpp"

#include <algorithm>
#include <cmath>

#include "nucdim/error.hpp"

namespace nucdim {

CrossedElement::CrossedElement(FiniteDynamicalSystem host) : host_(std::move(host)) {}

CrossedElement CrossedElement::zero(const FiniteDynamicalSystem& host) { return CrossedElement(host); }

CrossedElement CrossedElement::identity(const FiniteDynamicalSystem& host) {
  return unitary_power(host, 0);
}

CrossedElement CrossedElement::unitary_power(const FiniteDynamicalSystem& host, int power) {
  return monomial(host, constant_function(host.size(), 1.0), power);
}

CrossedElement CrossedElement::function(const FiniteDynamicalSystem& host, Function f) {
  return monomial(host, std::move(f), 0);
}

CrossedElement CrossedElement::monomial(const FiniteDynamicalSystem& host, Function f, int power) {
  CrossedElement a(host);
  a.set_coefficient(power, std::move(f));
  return a;
}

Function CrossedElement::coefficient(int power) const {
  auto it = coeffs_.find(power);
  return it == coeffs_.end() ? Function(host_.size(), 0.0) : it->second;
}

void CrossedElement::set_coefficient(int power, Function f) {
  if (f.size() != host_.size()) throw PreconditionError("coefficient is not defined on every point");
  coeffs_[power] = std::move(f);
  prune(power);
}

void CrossedElement::add_to_coefficient(int power, const Function& f) {
  if (f.size() != host_.size()) throw PreconditionError("coefficient is not defined on every point");
  auto [it, fresh] = coeffs_.try_emplace(power, host_.size(), 0.0);
  for (std::size_t x = 0; x < f.size(); ++x) it->second[x] += f[x];
  prune(power);
}

void CrossedElement::prune(int power) {
  auto it = coeffs_.find(power);
  if (it != coeffs_.end() &&
      std::all_of(it->second.begin(), it->second.end(), [](Complex c) { return c == Complex(0.0); }))
    coeffs_.erase(it);
}

int CrossedElement::support_radius() const {
  int r = 0;
  for (const auto& [i, _] : coeffs_) r = std::max(r, std::abs(i));
  return r;
}

double CrossedElement::coefficient_sup(int power) const {
  auto it = coeffs_.find(power);
  return it == coeffs_.end() ? 0.0 : sup_norm(it->second);
}

CrossedElement CrossedElement::restricted_to(const PointSet& points) const {
  CrossedElement out(host_);
  for (const auto& [i, f] : coeffs_) {
    Function g(f.size(), 0.0);
    for (PointIndex x : points) g.at(x) = f[x];
    out.set_coefficient(i, std::move(g));
  }
  return out;
}

void CrossedElement::check_host(const CrossedElement& other) const {
  if (!host_.same_host(other.host_)) throw PreconditionError("crossed elements live over different systems");
}

CrossedElement& CrossedElement::operator+=(const CrossedElement& other) {
  check_host(other);
  for (const auto& [i, f] : other.coeffs_) add_to_coefficient(i, f);
  return *this;
}

CrossedElement& CrossedElement::operator-=(const CrossedElement& other) {
  check_host(other);
  for (const auto& [i, f] : other.coeffs_) {
    Function g = f;
    for (auto& c : g) c = -c;
    add_to_coefficient(i, g);
  }
  return *this;
}

CrossedElement& CrossedElement::operator*=(Complex scalar) {
  std::vector<int> powers;
  for (auto& [i, f] : coeffs_) {
    for (auto& c : f) c *= scalar;
    powers.push_back(i);
  }
  for (int i : powers) prune(i);
  return *this;
}

CrossedElement operator+(CrossedElement a, const CrossedElement& b) { return a += b; }
CrossedElement operator-(CrossedElement a, const CrossedElement& b) { return a -= b; }
CrossedElement operator*(Complex s, CrossedElement a) { return a *= s; }
CrossedElement operator*(const CrossedElement& a, const CrossedElement& b) { return mul(a, b); }

CrossedElement mul(const CrossedElement& a, const CrossedElement& b) {
  if (!a.host().same_host(b.host())) throw PreconditionError("crossed elements live over different systems");
  const auto& sys = a.host();
  const std::size_t n = sys.size();
  std::map<int, Function> acc;
  for (const auto& [i, f] : a.coefficients()) {
    for (const auto& [j, g] : b.coefficients()) {
      auto [it, fresh] = acc.try_emplace(i + j, n, 0.0);
      for (PointIndex x = 0; x < n; ++x) it->second[x] += f[x] * g[sys.shift(x, -i)];
    }
  }
  CrossedElement out(sys);
  for (auto& [p, h] : acc) out.set_coefficient(p, std::move(h));
  return out;
}

CrossedElement adjoint(const CrossedElement& a) {
  const auto& sys = a.host();
  CrossedElement out(sys);
  for (const auto& [i, f] : a.coefficients()) {
    Function g(sys.size());
    for (PointIndex x = 0; x < sys.size(); ++x) g[x] = std::conj(f[sys.shift(x, i)]);
    out.set_coefficient(-i, std::move(g));
  }
  return out;
}

Function expectation(const CrossedElement& a) { return a.coefficient(0); }

double coefficient_distance(const CrossedElement& a, const CrossedElement& b) {
  double dist = 0.0;
  std::vector<int> powers;
  for (const auto& [i, _] : a.coefficients()) powers.push_back(i);
  for (const auto& [i, _] : b.coefficients()) powers.push_back(i);
  for (int i : powers) {
    const Function fa = a.coefficient(i), fb = b.coefficient(i);
    for (std::size_t x = 0; x < fa.size(); ++x) dist = std::max(dist, std::abs(fa[x] - fb[x]));
  }
  return dist;
}

Function constant_function(std::size_t n, Complex value) { return Function(n, value); }

Function indicator(std::size_t n, const PointSet& points) {
  Function f(n, 0.0);
  for (PointIndex x : points) f.at(x) = 1.0;
  return f;
}

double sup_norm(const Function& f) {
  double s = 0.0;
  for (Complex c : f) s = std::max(s, std::abs(c));
  return s;
}

} // namespace nucdim
