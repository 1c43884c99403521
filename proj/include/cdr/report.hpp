#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cdr/types.hpp"

namespace cdr {

/// What the summary needs from one anomaly.
struct AnomalyDigest {
  CellKey cell;
  Point epicenter;
  int t_start = 0;
  int t_stop = 0;
  double duration_min = 0.0;
  double start_hour = 0.0;  // local, [0, 24)
  int start_day = 0;        // days since the start of the week
  std::optional<double> r_c;
};

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};

struct ReportOptions {
  double span_days = 0.0;
  double duration_bin_min = 60.0;
  double r_c_bin_km = 0.5;
  double dedup_radius_km = 0.0;  // 0 = no spatial grouping
};

struct ReportStats {
  std::size_t count = 0;
  double per_day = 0.0;
  double mean_duration_min = 0.0;
  double median_duration_min = 0.0;
  std::optional<double> mean_r_c;
  std::size_t with_r_c = 0;
  double evening_fraction = 0.0;  // starts in [18:00, 24:00)
  std::size_t clusters = 0;       // after spatial grouping, equals count when off
  std::vector<HistogramBin> duration_hist;
  std::vector<HistogramBin> r_c_hist;
  std::vector<HistogramBin> start_hour_hist;
  std::vector<HistogramBin> start_day_hist;
};

ReportStats summarize(std::span<const AnomalyDigest> anomalies, const ReportOptions& options);

/// Groups anomalies whose windows overlap and whose epicentres lie within
/// `radius_km`, transitively. Returns a group id per anomaly.
std::vector<std::size_t> group_nearby(std::span<const AnomalyDigest> anomalies, double radius_km);

}  // namespace cdr
