#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nucdim/types.hpp"

namespace nucdim {

struct Cycle {
  PointIndex base;                // the point with the least label
  std::vector<PointIndex> points; // points[i+1] == forward(points[i])
  std::size_t length() const { return points.size(); }
};

struct CyclePosition {
  std::size_t cycle;
  std::size_t position;
};

struct OrbitDecomposition {
  std::vector<Cycle> cycles;
  std::vector<CyclePosition> index; // indexed by point
};

// Dense symmetric distance table.
class Metric {
public:
  Metric() = default;
  explicit Metric(std::size_t n) : n_(n), d_(n * n, 0.0) {}
  std::size_t size() const { return n_; }
  double operator()(PointIndex a, PointIndex b) const { return d_[a * n_ + b]; }
  void set(PointIndex a, PointIndex b, double v) {
    d_[a * n_ + b] = v;
    d_[b * n_ + a] = v;
  }

private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

// A finite set with a bijective forward map. Copies share one immutable payload.
class FiniteDynamicalSystem {
public:
  // Validates bijectivity and (unless trusted_metric) the metric axioms.
  static FiniteDynamicalSystem create(std::vector<std::string> labels,
                                      std::vector<PointIndex> forward,
                                      std::optional<Metric> metric, int declared_dim,
                                      bool trusted_metric = false);

  std::size_t size() const;
  const std::string& label(PointIndex x) const;
  const std::vector<std::string>& labels() const;
  std::optional<PointIndex> find(std::string_view label) const;
  PointIndex index_of(std::string_view label) const; // throws if unknown

  PointIndex forward(PointIndex x) const;
  PointIndex backward(PointIndex x) const;
  // forward^n(x) for any integer n.
  PointIndex shift(PointIndex x, std::int64_t n) const;
  Permutation shift_permutation(std::int64_t n) const;

  int declared_dim() const;
  bool has_metric() const;
  const Metric& metric() const; // throws if absent
  double distance(PointIndex a, PointIndex b) const;

  const OrbitDecomposition& orbits() const;
  std::size_t cycle_length_of(PointIndex x) const;

  bool same_host(const FiniteDynamicalSystem& other) const { return data_ == other.data_; }

private:
  struct Data;
  explicit FiniteDynamicalSystem(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  std::shared_ptr<const Data> data_;
};

struct InvariantSplit {
  std::size_t N = 0;
  PointSet short_part;  // union of cycles of length <= N
  PointSet long_part;   // union of cycles of length > N
  std::vector<std::size_t> short_cycles;
  std::vector<std::size_t> long_cycles;
};

struct QuotientFiber {
  std::size_t cycle;
  std::string base_label;
  std::size_t length;
  std::string stabilizer;  // e.g. "5Z"
  std::string fiber;       // e.g. "M_5 over the circle"
  int fiber_dimnuc = 1;
};

struct QuotientReport {
  std::vector<QuotientFiber> fibers;
  int declared_dim = 0;
  int quotient_dim_plus_one = 1;
  int sup_fiber_dimnuc_plus_one = 0;
  // (declared_dim + 1) * sup fiber dimnuc^{+1}; an upper bound for dimnuc^{+1}.
  int bound_plus_one = 0;
};

FiniteDynamicalSystem load_system(std::string_view document);
FiniteDynamicalSystem load_system_file(const std::filesystem::path& path);
std::string system_to_json(const FiniteDynamicalSystem& sys);

FiniteDynamicalSystem make_cycle_system(std::span<const std::size_t> lengths, int d);
FiniteDynamicalSystem make_rotation_system(std::size_t q, std::int64_t p, int d = 1);

OrbitDecomposition orbit_decomposition(const FiniteDynamicalSystem& sys);
InvariantSplit invariant_split(const FiniteDynamicalSystem& sys, std::size_t N);
QuotientReport quotient_report(const FiniteDynamicalSystem& sys);

// The subsystem on an invariant subset; labels, metric and dimension are inherited.
FiniteDynamicalSystem restrict_system(const FiniteDynamicalSystem& sys, const PointSet& invariant);

// Union of the points of the listed cycles.
PointSet cycle_points(const FiniteDynamicalSystem& sys, std::span<const std::size_t> cycles);

} // namespace nucdim
