#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "nucdim/fiber_rep.hpp"

namespace nucdim {

struct NormOptions {
  double tol = 1e-3;
  // Orbits up to this length use a dense eigensolver; longer ones use Lanczos.
  std::size_t dense_limit = 256;
  std::uint64_t seed = 0x5eed;
  unsigned threads = 1;
  std::size_t max_grid = std::size_t{1} << 22;
};

struct OrbitNorm {
  std::size_t cycle = 0;
  std::size_t length = 0;
  double value = 0.0;
  Complex argmax_lambda{1.0, 0.0};
  std::size_t grid = 1;
  bool exact = false;
};

// value <= ||a|| <= value + tol.
struct NormResult {
  double value = 0.0;
  double tol = 0.0;
  std::size_t grid = 0;
  std::vector<OrbitNorm> per_orbit;
  bool exact = false; // every orbit evaluated in closed form

  double upper() const { return exact ? value : value + tol; }
};

// Extra matrix-valued terms on chosen cycles, in the basis of orbit_rep, as functions of
// theta where lambda = e^{i theta}.
struct FiberCorrection {
  std::function<bool(std::size_t cycle)> active;
  std::function<Matrix(std::size_t cycle, double theta)> evaluate;
  // Lipschitz constant in theta of the operator-norm valued map.
  std::function<double(std::size_t cycle)> lipschitz;
};

struct FiberSection {
  CrossedElement crossed;
  std::optional<FiberCorrection> correction;
};

double spectral_norm(const Matrix& a);
// Largest singular value of the orbit matrix at lambda, dense or Krylov by size.
double spectral_norm(const OrbitCoefficients& a, Complex lambda, const NormOptions& opts);

// Power-of-two grid size G with lipschitz * pi / G <= tol.
std::size_t grid_for(double lipschitz, double tol, std::size_t max_grid);

NormResult norm(const CrossedElement& a, const NormOptions& opts = {});
NormResult norm(const FiberSection& s, const NormOptions& opts = {});

} // namespace nucdim
