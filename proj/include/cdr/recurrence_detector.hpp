#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cdr/types.hpp"

namespace cdr {

using PhaseBin = std::pair<std::int64_t, std::int64_t>;

/// Occupancy of the (V(t), V(t + lag)) phase plane, binned into squares of
/// `phase_bin_width` volume units. Uses circular rotation, so every bin of the
/// series contributes exactly one point.
struct RecurrenceHistogram {
  int lag = 1;
  double phase_bin_width = 20.0;
  std::map<PhaseBin, std::int64_t> counts;
  std::int64_t n_points = 0;

  PhaseBin bin_of(double v_now, double v_lagged) const;
  std::int64_t count(PhaseBin bin) const;
  double probability(PhaseBin bin) const;
};

/// Probability cut-off for a phase bin. The default, 1/(24*7*W), is kept as an
/// exact integer ratio so the strict comparison is not at the mercy of rounding.
class ProbabilityThreshold {
 public:
  static ProbabilityThreshold hourly_per_span(int weeks);
  static ProbabilityThreshold fixed(double p);

  /// True when count / n_points < threshold.
  bool below(std::int64_t count, std::int64_t n_points) const;
  double value() const { return value_; }

 private:
  ProbabilityThreshold(double value, std::int64_t inverse) : value_(value), inverse_(inverse) {}
  double value_;
  std::int64_t inverse_;  // 0 when the threshold is an arbitrary real
};

struct RecurrenceOptions {
  double phase_bin_width = 20.0;
  std::optional<double> p_thr;  // default: 1/(24*7*W)
};

/// Flagged bins. `lag_hits` holds, per histogram, the bins flagged at that lag;
/// `points` is their union.
struct SuspiciousPointSet {
  std::vector<int> points;
  std::vector<std::vector<int>> lag_hits;

  bool contains(int t) const;
};

/// Throws ConfigError for a non-positive width or a lag outside (0, n).
RecurrenceHistogram build_recurrence_hist(std::span<const double> volume, int lag,
                                          double phase_bin_width);

/// A bin t is suspicious when the phase bin of (V(t), V(t + lag)) is
/// improbable in any of the histograms.
SuspiciousPointSet flag_recurrence_points(std::span<const double> volume,
                                          std::span<const RecurrenceHistogram> histograms,
                                          const ProbabilityThreshold& p_thr);

/// Both standard lags (one bin and one week) with the configured threshold.
SuspiciousPointSet detect_recurrence(std::span<const double> volume, int bins_per_week,
                                     const RecurrenceOptions& options);

/// Groups suspicious bins into maximal contiguous runs. Singletons are kept.
std::vector<Run> recurrence_runs(const SuspiciousPointSet& points, CellKey cell = {});

}  // namespace cdr
