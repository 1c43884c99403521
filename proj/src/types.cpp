#include "cdr/types.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>

namespace cdr {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

GridCell GridCell::containing(Point p, double cell_size) {
  return GridCell{{static_cast<std::int32_t>(std::floor(p.x / cell_size)),
                   static_cast<std::int32_t>(std::floor(p.y / cell_size))},
                  cell_size};
}

std::uint64_t LocationSeries::total() const {
  return std::accumulate(volume.begin(), volume.end(), std::uint64_t{0});
}

std::vector<double> LocationSeries::as_real() const {
  return {volume.begin(), volume.end()};
}

std::vector<int> sorted_union(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace cdr
