#include "nucdim/types.hpp"

#include <algorithm>
#include <iterator>

namespace nucdim {

PointSet make_point_set(std::vector<PointIndex> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

bool contains(const PointSet& set, PointIndex x) {
  return std::binary_search(set.begin(), set.end(), x);
}

PointSet set_union(const PointSet& a, const PointSet& b) {
  PointSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

PointSet set_intersection(const PointSet& a, const PointSet& b) {
  PointSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

PointSet set_difference(const PointSet& a, const PointSet& b) {
  PointSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

PointSet image(const PointSet& set, const Permutation& perm) {
  std::vector<PointIndex> out;
  out.reserve(set.size());
  for (PointIndex x : set) out.push_back(perm.at(x));
  return make_point_set(std::move(out));
}

} // namespace nucdim
