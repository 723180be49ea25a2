#include "nucdim/norm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include <Eigen/Eigenvalues>

#include "nucdim/error.hpp"

namespace nucdim {

namespace {

using Op = std::function<Vector(const Vector&)>;

// Largest eigenvalue of a positive semidefinite operator by Lanczos with full
// reorthogonalisation, restarted from the best Ritz vector.
double lanczos_top(const Op& op, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vector v0(n);
  for (Eigen::Index i = 0; i < n; ++i) v0(i) = Complex(gauss(rng), gauss(rng));
  v0.normalize();

  const Eigen::Index max_steps = std::min<Eigen::Index>(n, 80);
  double best = 0.0;
  for (int restart = 0; restart < 40; ++restart) {
    Matrix V(n, max_steps + 1);
    std::vector<double> alpha, beta;
    V.col(0) = v0;
    Eigen::Index steps = 0;
    bool invariant = false;
    for (Eigen::Index j = 0; j < max_steps; ++j) {
      Vector w = op(V.col(j));
      const double a = V.col(j).dot(w).real();
      alpha.push_back(a);
      for (int pass = 0; pass < 2; ++pass) {
        const auto basis = V.leftCols(j + 1);
        w -= basis * (basis.adjoint() * w);
      }
      const double b = w.norm();
      steps = j + 1;
      if (b <= 1e-13 * std::max(1.0, std::abs(a))) {
        invariant = true;
        beta.push_back(0.0);
        break;
      }
      beta.push_back(b);
      V.col(j + 1) = w / b;
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
    for (Eigen::Index j = 0; j < steps; ++j) {
      T(j, j) = alpha[static_cast<std::size_t>(j)];
      if (j + 1 < steps) T(j, j + 1) = T(j + 1, j) = beta[static_cast<std::size_t>(j)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const Eigen::Index top = steps - 1;
    const double theta = es.eigenvalues()(top);
    const Eigen::VectorXd s = es.eigenvectors().col(top);
    best = std::max(best, theta);
    const double resid = invariant ? 0.0 : beta.back() * std::abs(s(top));
    if (resid <= 1e-10 * std::max(theta, 1e-300) || steps == n) return best;
    v0 = V.leftCols(steps) * s.cast<Complex>();
    v0.normalize();
  }
  return best;
}

template <class Fn>
std::vector<double> parallel_map(std::size_t count, unsigned threads, Fn fn) {
  std::vector<double> out(count, 0.0);
  const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (t <= 1) {
    for (std::size_t g = 0; g < count; ++g) out[g] = fn(g);
    return out;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < t; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t g = w; g < count; g += t) out[g] = fn(g);
    });
  for (auto& th : pool) th.join();
  return out;
}

double theta_at(std::size_t g, std::size_t grid) {
  return 2.0 * std::numbers::pi * static_cast<double>(g) / static_cast<double>(grid);
}

void check_options(const NormOptions& opts) {
  if (!(opts.tol > 0.0)) throw PreconditionError("norm: tolerance must be positive");
}

OrbitNorm sweep(std::size_t cycle, std::size_t length, std::size_t grid, unsigned threads,
                const std::function<double(double)>& at_theta) {
  OrbitNorm out;
  out.cycle = cycle;
  out.length = length;
  out.grid = grid;
  const auto vals = parallel_map(grid, threads, [&](std::size_t g) { return at_theta(theta_at(g, grid)); });
  std::size_t arg = 0;
  for (std::size_t g = 1; g < grid; ++g)
    if (vals[g] > vals[arg]) arg = g;
  out.value = vals.empty() ? 0.0 : vals[arg];
  out.argmax_lambda = std::polar(1.0, theta_at(arg, grid));
  return out;
}

OrbitNorm crossed_orbit_norm(const CrossedElement& a, std::size_t cycle, const NormOptions& opts) {
  const auto coeffs = OrbitCoefficients::of(a, cycle);
  OrbitNorm out;
  out.cycle = cycle;
  out.length = coeffs.length;
  if (coeffs.terms.empty()) {
    out.exact = true;
    return out;
  }
  if (coeffs.terms.size() == 1) {
    // phi(f) w^i with w unitary.
    out.value = coeffs.terms.front().second.cwiseAbs().maxCoeff();
    out.exact = true;
    return out;
  }
  const std::size_t G = grid_for(coeffs.lipschitz_gauge(), opts.tol, opts.max_grid);
  return sweep(cycle, coeffs.length, G, opts.threads,
               [&](double theta) { return spectral_norm(coeffs, std::polar(1.0, theta), opts); });
}

NormResult collect(std::vector<OrbitNorm> per_orbit, const NormOptions& opts) {
  NormResult r;
  r.tol = opts.tol;
  r.exact = std::all_of(per_orbit.begin(), per_orbit.end(), [](const OrbitNorm& o) { return o.exact; });
  for (const auto& o : per_orbit) {
    r.value = std::max(r.value, o.value);
    r.grid = std::max(r.grid, o.grid);
  }
  r.per_orbit = std::move(per_orbit);
  return r;
}

} // namespace

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  const Matrix h = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double spectral_norm(const OrbitCoefficients& a, Complex lambda, const NormOptions& opts) {
  if (a.length <= opts.dense_limit) return spectral_norm(a.matrix(lambda));
  const Op op = [&](const Vector& v) { return a.apply_adjoint(lambda, a.apply(lambda, v)); };
  return std::sqrt(std::max(0.0, lanczos_top(op, static_cast<Eigen::Index>(a.length), opts.seed)));
}

std::size_t grid_for(double lipschitz, double tol, std::size_t max_grid) {
  std::size_t G = 1;
  while (lipschitz * std::numbers::pi / static_cast<double>(G) > tol) {
    G *= 2;
    if (G > max_grid) throw PreconditionError("norm: tolerance needs more than " + std::to_string(max_grid) + " samples");
  }
  return G;
}

NormResult norm(const CrossedElement& a, const NormOptions& opts) {
  check_options(opts);
  std::vector<OrbitNorm> per;
  const auto& cycles = a.host().orbits().cycles;
  for (std::size_t c = 0; c < cycles.size(); ++c) per.push_back(crossed_orbit_norm(a, c, opts));
  return collect(std::move(per), opts);
}

NormResult norm(const FiberSection& s, const NormOptions& opts) {
  check_options(opts);
  if (!s.correction) return norm(s.crossed, opts);
  const auto& corr = *s.correction;
  std::vector<OrbitNorm> per;
  const auto& cycles = s.crossed.host().orbits().cycles;
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    if (!corr.active(c)) {
      per.push_back(crossed_orbit_norm(s.crossed, c, opts));
      continue;
    }
    const auto coeffs = OrbitCoefficients::of(s.crossed, c);
    const double lip = coeffs.lipschitz_entries() + corr.lipschitz(c);
    const std::size_t G = grid_for(lip, opts.tol, opts.max_grid);
    per.push_back(sweep(c, coeffs.length, G, opts.threads, [&](double theta) {
      Matrix m = corr.evaluate(c, theta);
      if (!coeffs.terms.empty()) m += coeffs.matrix(std::polar(1.0, theta));
      return spectral_norm(m);
    }));
  }
  return collect(std::move(per), opts);
}

} // namespace nucdim
