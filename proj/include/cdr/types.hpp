#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "cdr/time_grid.hpp"

namespace cdr {

/// Planar position in projected kilometres.
struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

double distance(Point a, Point b);

/// Integer index of a square grid cell. Ordered so maps keyed by cell iterate
/// deterministically.
struct CellKey {
  std::int32_t ix = 0;
  std::int32_t iy = 0;

  auto operator<=>(const CellKey&) const = default;
};

struct GridCell {
  CellKey key;
  double cell_size = 1.0;

  /// Cell containing `p` for the given cell size.
  static GridCell containing(Point p, double cell_size);

  Point center() const {
    return {(key.ix + 0.5) * cell_size, (key.iy + 0.5) * cell_size};
  }

  bool operator==(const GridCell&) const = default;
};

enum class CallKind : std::uint8_t { voice, text };

/// One directed communication event.
struct CallRecord {
  Timestamp timestamp;
  std::string caller_id;
  std::string callee_id;
  std::string tower_id;
  CallKind kind = CallKind::voice;

  bool operator==(const CallRecord&) const = default;
};

/// Per-cell event counts on a TimeGrid.
struct LocationSeries {
  GridCell cell;
  std::vector<std::uint32_t> volume;

  std::uint64_t total() const;
  std::vector<double> as_real() const;
};

/// A contiguous bin interval flagged by one or both detectors. The flag sets
/// are kept sorted and duplicate free.
struct Run {
  CellKey cell;
  int t_start = 0;
  int t_stop = 0;
  std::vector<int> flagged_variance;
  std::vector<int> flagged_recurrence;

  int length() const { return t_stop - t_start + 1; }
  bool operator==(const Run&) const = default;
};

/// A confirmed run.
struct Anomaly {
  Run run;
  int duration_bins = 0;
  Point epicenter;

  bool operator==(const Anomaly&) const = default;
};

/// Sorted union of two sorted index sets.
std::vector<int> sorted_union(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace cdr
