#include "cdr/recurrence_detector.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "cdr/error.hpp"

namespace cdr {

PhaseBin RecurrenceHistogram::bin_of(double v_now, double v_lagged) const {
  return {static_cast<std::int64_t>(std::floor(v_now / phase_bin_width)),
          static_cast<std::int64_t>(std::floor(v_lagged / phase_bin_width))};
}

std::int64_t RecurrenceHistogram::count(PhaseBin bin) const {
  auto it = counts.find(bin);
  return it == counts.end() ? 0 : it->second;
}

double RecurrenceHistogram::probability(PhaseBin bin) const {
  return n_points == 0 ? 0.0 : static_cast<double>(count(bin)) / static_cast<double>(n_points);
}

ProbabilityThreshold ProbabilityThreshold::hourly_per_span(int weeks) {
  const std::int64_t inverse = std::int64_t{24} * 7 * weeks;
  return {1.0 / static_cast<double>(inverse), inverse};
}

ProbabilityThreshold ProbabilityThreshold::fixed(double p) { return {p, 0}; }

bool ProbabilityThreshold::below(std::int64_t count, std::int64_t n_points) const {
  if (inverse_ > 0) return count * inverse_ < n_points;
  return static_cast<double>(count) / static_cast<double>(n_points) < value_;
}

bool SuspiciousPointSet::contains(int t) const {
  return std::binary_search(points.begin(), points.end(), t);
}

RecurrenceHistogram build_recurrence_hist(std::span<const double> volume, int lag,
                                          double phase_bin_width) {
  if (!(phase_bin_width > 0.0)) throw ConfigError("phase_bin_width must be positive");
  const auto n = static_cast<std::int64_t>(volume.size());
  if (lag <= 0 || lag >= n) {
    throw ConfigError("recurrence lag " + std::to_string(lag) + " outside (0, " +
                      std::to_string(n) + ")");
  }
  RecurrenceHistogram h{lag, phase_bin_width, {}, n};
  for (std::int64_t t = 0; t < n; ++t) {
    ++h.counts[h.bin_of(volume[t], volume[(t + lag) % n])];
  }
  return h;
}

SuspiciousPointSet flag_recurrence_points(std::span<const double> volume,
                                          std::span<const RecurrenceHistogram> histograms,
                                          const ProbabilityThreshold& p_thr) {
  SuspiciousPointSet out;
  const auto n = static_cast<std::int64_t>(volume.size());
  for (const auto& h : histograms) {
    std::vector<int> hits;
    for (std::int64_t t = 0; t < n; ++t) {
      const auto bin = h.bin_of(volume[t], volume[(t + h.lag) % n]);
      if (p_thr.below(h.count(bin), h.n_points)) hits.push_back(static_cast<int>(t));
    }
    out.points = sorted_union(out.points, hits);
    out.lag_hits.push_back(std::move(hits));
  }
  return out;
}

SuspiciousPointSet detect_recurrence(std::span<const double> volume, int bins_per_week,
                                     const RecurrenceOptions& options) {
  const int weeks = static_cast<int>(volume.size() / static_cast<std::size_t>(bins_per_week));
  const std::vector<RecurrenceHistogram> hists{
      build_recurrence_hist(volume, 1, options.phase_bin_width),
      build_recurrence_hist(volume, bins_per_week, options.phase_bin_width)};
  const auto threshold = options.p_thr ? ProbabilityThreshold::fixed(*options.p_thr)
                                       : ProbabilityThreshold::hourly_per_span(weeks);
  return flag_recurrence_points(volume, hists, threshold);
}

std::vector<Run> recurrence_runs(const SuspiciousPointSet& points, CellKey cell) {
  std::vector<Run> runs;
  const auto& p = points.points;
  std::size_t i = 0;
  while (i < p.size()) {
    std::size_t j = i;
    while (j + 1 < p.size() && p[j + 1] == p[j] + 1) ++j;
    runs.push_back(Run{cell, p[i], p[j], {}, std::vector<int>(p.begin() + static_cast<long>(i),
                                                               p.begin() + static_cast<long>(j) + 1)});
    i = j + 1;
  }
  return runs;
}

}  // namespace cdr
