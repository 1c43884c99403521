#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "cdr/types.hpp"

namespace cdr {

enum class StdMode { population, sample };

/// Whether the week a bin belongs to contributes to its own baseline.
enum class ProfileMode { self_inclusive, leave_one_out };

/// Per week-position mean and standard deviation over the W weekly copies.
struct WeeklyProfile {
  std::vector<double> mean;
  std::vector<double> std;
  int weeks = 0;
};

/// Weekly standard scores. Bins whose baseline spread is zero hold NaN.
struct ZSeries {
  std::vector<double> z;

  bool defined(std::size_t t) const { return !std::isnan(z[t]); }
  std::size_t size() const { return z.size(); }
};

inline constexpr double kUndefinedZ = std::numeric_limits<double>::quiet_NaN();

struct VarianceOptions {
  double z_thr = 2.5;
  StdMode std_mode = StdMode::population;
  ProfileMode profile_mode = ProfileMode::leave_one_out;
};

/// Throws ConfigError unless `volume.size()` is a multiple of `bins_per_week`
/// covering at least two weeks.
WeeklyProfile weekly_profile(std::span<const double> volume, int bins_per_week,
                             StdMode mode = StdMode::population);

/// z(t) = (V(t) - mean[pos]) / std[pos] against a profile that includes the
/// bin's own week.
ZSeries z_series(std::span<const double> volume, const WeeklyProfile& profile);

/// Same standardisation, but each bin is compared with the other W-1 weeks only.
ZSeries z_series_leave_one_out(std::span<const double> volume, int bins_per_week,
                               StdMode mode = StdMode::population);

ZSeries compute_z(std::span<const double> volume, int bins_per_week, const VarianceOptions& options);

/// Maximal runs of consecutive defined bins with z > z_thr. Single-bin runs are
/// dropped.
std::vector<Run> flag_variance_runs(const ZSeries& z, double z_thr, CellKey cell = {});

}  // namespace cdr
