#include "cdr/assembler.hpp"

#include <algorithm>

#include "cdr/error.hpp"
#include "cdr/parallel.hpp"

namespace cdr {

bool mergeable(const Run& first, const Run& second, const MergeRule& rule) {
  if (second.t_start <= first.t_stop) return true;
  const int gap = second.t_start - first.t_stop - 1;
  return gap < rule.max_gap && std::max(first.length(), second.length()) > rule.min_long;
}

std::vector<Run> merge_runs(std::vector<Run> runs, const MergeRule& rule) {
  auto by_start = [](const Run& a, const Run& b) {
    return a.t_start != b.t_start ? a.t_start < b.t_start : a.t_stop < b.t_stop;
  };
  std::sort(runs.begin(), runs.end(), by_start);
  // A merge can lengthen a run enough to satisfy the gap rule with an earlier
  // neighbour, so sweep until nothing changes.
  bool changed = true;
  while (changed && runs.size() > 1) {
    changed = false;
    std::vector<Run> out;
    out.reserve(runs.size());
    for (auto& run : runs) {
      if (!out.empty() && mergeable(out.back(), run, rule)) {
        Run& cur = out.back();
        cur.t_stop = std::max(cur.t_stop, run.t_stop);
        cur.flagged_variance = sorted_union(cur.flagged_variance, run.flagged_variance);
        cur.flagged_recurrence = sorted_union(cur.flagged_recurrence, run.flagged_recurrence);
        changed = true;
      } else {
        out.push_back(std::move(run));
      }
    }
    runs = std::move(out);
  }
  return runs;
}

std::vector<Anomaly> confirm_anomalies(const std::vector<Run>& merged,
                                       const SuspiciousPointSet& suspicious, const GridCell& cell,
                                       int min_duration) {
  std::vector<Anomaly> out;
  for (const auto& run : merged) {
    if (run.length() < min_duration) continue;
    const auto lo = std::lower_bound(suspicious.points.begin(), suspicious.points.end(), run.t_start);
    const auto hi = std::upper_bound(lo, suspicious.points.end(), run.t_stop);
    Run confirmed = run;
    confirmed.flagged_recurrence = sorted_union(run.flagged_recurrence, std::vector<int>(lo, hi));
    const bool dual = std::any_of(
        confirmed.flagged_variance.begin(), confirmed.flagged_variance.end(), [&](int t) {
          return std::binary_search(confirmed.flagged_recurrence.begin(),
                                    confirmed.flagged_recurrence.end(), t);
        });
    if (!dual) continue;
    confirmed.cell = cell.key;
    out.push_back(Anomaly{std::move(confirmed), run.length(), cell.center()});
  }
  return out;
}

void check_anomaly(const Anomaly& a, int min_duration) {
  const Run& r = a.run;
  auto fail = [&](const char* what) {
    throw DataError("anomaly at bin " + std::to_string(r.t_start) + ": " + what);
  };
  if (r.t_start > r.t_stop) fail("start after stop");
  if (a.duration_bins != r.length()) fail("duration does not match its run");
  if (a.duration_bins < min_duration) fail("shorter than the minimum duration");
  for (const auto* flags : {&r.flagged_variance, &r.flagged_recurrence}) {
    if (!std::is_sorted(flags->begin(), flags->end())) fail("unsorted flags");
    if (!flags->empty() && (flags->front() < r.t_start || flags->back() > r.t_stop)) {
      fail("flag outside its run");
    }
  }
  std::vector<int> both;
  std::set_intersection(r.flagged_variance.begin(), r.flagged_variance.end(),
                        r.flagged_recurrence.begin(), r.flagged_recurrence.end(),
                        std::back_inserter(both));
  if (both.empty()) fail("no bin flagged by both detectors");
}

LocationDetection detect_location(const LocationSeries& series, const TimeGrid& grid,
                                  const DetectorConfig& config) {
  const auto volume = series.as_real();
  LocationDetection d;
  d.z = compute_z(volume, grid.bins_per_week(), config.variance);
  d.variance_runs = flag_variance_runs(d.z, config.variance.z_thr, series.cell.key);
  d.suspicious = detect_recurrence(volume, grid.bins_per_week(), config.recurrence);
  d.recurrence_runs = recurrence_runs(d.suspicious, series.cell.key);
  std::vector<Run> pool = d.variance_runs;
  pool.insert(pool.end(), d.recurrence_runs.begin(), d.recurrence_runs.end());
  d.merged = merge_runs(std::move(pool), config.merge);
  d.anomalies = confirm_anomalies(d.merged, d.suspicious, series.cell, config.min_duration);
  return d;
}

std::vector<Anomaly> detect_all(const LocationSeriesSet& set, const DetectorConfig& config,
                                int jobs) {
  std::vector<const LocationSeries*> cells;
  for (const auto& [key, series] : set.cells) cells.push_back(&series);
  std::vector<std::vector<Anomaly>> found(cells.size());
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    found[i] = detect_location(*cells[i], set.grid, config).anomalies;
  });
  std::vector<Anomaly> out;
  for (auto& list : found) {
    for (auto& a : list) out.push_back(std::move(a));
  }
  return out;
}

}  // namespace cdr
