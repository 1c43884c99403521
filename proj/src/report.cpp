#include "cdr/report.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cdr {

namespace {

std::vector<HistogramBin> histogram(const std::vector<double>& values, double width, double lo,
                                    std::size_t min_bins) {
  std::size_t n = min_bins;
  for (double v : values) {
    n = std::max(n, static_cast<std::size_t>(std::floor((v - lo) / width)) + 1);
  }
  std::vector<HistogramBin> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].lower = lo + static_cast<double>(i) * width;
    out[i].upper = out[i].lower + width;
  }
  for (double v : values) {
    ++out[static_cast<std::size_t>(std::floor((v - lo) / width))].count;
  }
  return out;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) i = parent[i] = parent[parent[i]];
  return i;
}

}  // namespace

std::vector<std::size_t> group_nearby(std::span<const AnomalyDigest> anomalies, double radius_km) {
  std::vector<std::size_t> parent(anomalies.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  if (radius_km > 0.0) {
    for (std::size_t i = 0; i < anomalies.size(); ++i) {
      for (std::size_t j = i + 1; j < anomalies.size(); ++j) {
        const auto& a = anomalies[i];
        const auto& b = anomalies[j];
        const bool overlap = a.t_start <= b.t_stop && b.t_start <= a.t_stop;
        if (overlap && distance(a.epicenter, b.epicenter) <= radius_km) {
          parent[find_root(parent, i)] = find_root(parent, j);
        }
      }
    }
  }
  std::vector<std::size_t> group(anomalies.size());
  for (std::size_t i = 0; i < anomalies.size(); ++i) group[i] = find_root(parent, i);
  return group;
}

ReportStats summarize(std::span<const AnomalyDigest> anomalies, const ReportOptions& options) {
  ReportStats s;
  s.count = anomalies.size();
  if (options.span_days > 0.0) s.per_day = static_cast<double>(s.count) / options.span_days;

  std::vector<double> durations, r_cs, hours, days;
  std::size_t evening = 0;
  for (const auto& a : anomalies) {
    durations.push_back(a.duration_min);
    hours.push_back(a.start_hour);
    days.push_back(a.start_day);
    if (a.start_hour >= 18.0) ++evening;
    if (a.r_c) r_cs.push_back(*a.r_c);
  }
  if (!durations.empty()) {
    s.mean_duration_min = std::accumulate(durations.begin(), durations.end(), 0.0) /
                          static_cast<double>(durations.size());
    auto sorted = durations;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t h = sorted.size() / 2;
    s.median_duration_min = sorted.size() % 2 == 1 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
    s.evening_fraction = static_cast<double>(evening) / static_cast<double>(s.count);
  }
  s.with_r_c = r_cs.size();
  if (!r_cs.empty()) {
    s.mean_r_c = std::accumulate(r_cs.begin(), r_cs.end(), 0.0) / static_cast<double>(r_cs.size());
  }
  const auto groups = group_nearby(anomalies, options.dedup_radius_km);
  auto distinct = groups;
  std::sort(distinct.begin(), distinct.end());
  s.clusters = static_cast<std::size_t>(std::unique(distinct.begin(), distinct.end()) - distinct.begin());

  s.duration_hist = histogram(durations, options.duration_bin_min, 0.0, 1);
  s.r_c_hist = histogram(r_cs, options.r_c_bin_km, 0.0, 1);
  s.start_hour_hist = histogram(hours, 1.0, 0.0, 24);
  s.start_day_hist = histogram(days, 1.0, 0.0, 7);
  return s;
}

}  // namespace cdr
