#pragma once

#include <vector>

#include "cdr/ingestion.hpp"
#include "cdr/recurrence_detector.hpp"
#include "cdr/types.hpp"
#include "cdr/variance_detector.hpp"

namespace cdr {

/// Two runs that do not overlap merge when fewer than `max_gap` unflagged bins
/// separate them and at least one is longer than `min_long` bins.
struct MergeRule {
  int max_gap = 4;
  int min_long = 4;
};

/// `first` must not start after `second`.
bool mergeable(const Run& first, const Run& second, const MergeRule& rule);

/// Merges runs of one location to a fixpoint. Input order does not matter.
std::vector<Run> merge_runs(std::vector<Run> runs, const MergeRule& rule = {});

/// Keeps merged runs at least `min_duration` bins long that contain a bin
/// flagged by both detectors. Recurrence marks inside each run are refreshed
/// from `suspicious`.
std::vector<Anomaly> confirm_anomalies(const std::vector<Run>& merged,
                                       const SuspiciousPointSet& suspicious, const GridCell& cell,
                                       int min_duration = 5);

/// Throws DataError if `a` breaks the Anomaly invariants.
void check_anomaly(const Anomaly& a, int min_duration = 5);

struct DetectorConfig {
  VarianceOptions variance;
  RecurrenceOptions recurrence;
  MergeRule merge;
  int min_duration = 5;
};

/// Every intermediate of one location's detection, for inspection and plotting.
struct LocationDetection {
  ZSeries z;
  SuspiciousPointSet suspicious;
  std::vector<Run> variance_runs;
  std::vector<Run> recurrence_runs;
  std::vector<Run> merged;
  std::vector<Anomaly> anomalies;
};

LocationDetection detect_location(const LocationSeries& series, const TimeGrid& grid,
                                  const DetectorConfig& config);

/// Anomalies of all locations ordered by cell, then start bin. Locations are
/// processed on up to `jobs` threads; the output does not depend on `jobs`.
std::vector<Anomaly> detect_all(const LocationSeriesSet& set, const DetectorConfig& config,
                                int jobs = 1);

}  // namespace cdr
