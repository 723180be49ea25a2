#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <boost/rational.hpp>

namespace nucdim {

using Complex = std::complex<double>;
using Rational = boost::rational<std::int64_t>;

using PointIndex = std::size_t;
// Sorted, duplicate-free list of point indices.
using PointSet = std::vector<PointIndex>;
// perm[x] is the image of point x.
using Permutation = std::vector<PointIndex>;
// A complex-valued function on the point set, indexed by point.
using Function = std::vector<Complex>;

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

PointSet make_point_set(std::vector<PointIndex> points);
bool contains(const PointSet& set, PointIndex x);
PointSet set_union(const PointSet& a, const PointSet& b);
PointSet set_intersection(const PointSet& a, const PointSet& b);
PointSet set_difference(const PointSet& a, const PointSet& b);
PointSet image(const PointSet& set, const Permutation& perm);

} // namespace nucdim
