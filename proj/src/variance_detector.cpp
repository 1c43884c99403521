#include "cdr/variance_detector.hpp"

#include <numeric>

#include "cdr/error.hpp"

namespace cdr {

namespace {

int checked_weeks(std::span<const double> volume, int bins_per_week) {
  if (bins_per_week <= 0 || volume.size() % static_cast<std::size_t>(bins_per_week) != 0) {
    throw ConfigError("series length " + std::to_string(volume.size()) +
                      " is not a whole number of weeks");
  }
  const int weeks = static_cast<int>(volume.size() / static_cast<std::size_t>(bins_per_week));
  if (weeks < 2) throw ConfigError("weekly profile needs at least two weeks of data");
  return weeks;
}

// Spread below this, relative to the level, is treated as exactly zero.
bool negligible(double sd, double mean) { return !(sd > 1e-12 * std::max(1.0, std::abs(mean))); }

}  // namespace

WeeklyProfile weekly_profile(std::span<const double> volume, int bins_per_week, StdMode mode) {
  const int weeks = checked_weeks(volume, bins_per_week);
  const auto bpw = static_cast<std::size_t>(bins_per_week);
  WeeklyProfile p{std::vector<double>(bpw), std::vector<double>(bpw), weeks};
  const double divisor = mode == StdMode::population ? weeks : weeks - 1;
  for (std::size_t pos = 0; pos < bpw; ++pos) {
    double sum = 0.0;
    for (int k = 0; k < weeks; ++k) sum += volume[pos + k * bpw];
    const double mean = sum / weeks;
    double ss = 0.0;
    for (int k = 0; k < weeks; ++k) {
      const double d = volume[pos + k * bpw] - mean;
      ss += d * d;
    }
    p.mean[pos] = mean;
    p.std[pos] = std::sqrt(ss / divisor);
  }
  return p;
}

ZSeries z_series(std::span<const double> volume, const WeeklyProfile& profile) {
  const std::size_t bpw = profile.mean.size();
  ZSeries out{std::vector<double>(volume.size(), kUndefinedZ)};
  for (std::size_t t = 0; t < volume.size(); ++t) {
    const std::size_t pos = t % bpw;
    if (!negligible(profile.std[pos], profile.mean[pos])) {
      out.z[t] = (volume[t] - profile.mean[pos]) / profile.std[pos];
    }
  }
  return out;
}

ZSeries z_series_leave_one_out(std::span<const double> volume, int bins_per_week, StdMode mode) {
  const int weeks = checked_weeks(volume, bins_per_week);
  const auto bpw = static_cast<std::size_t>(bins_per_week);
  const int others = weeks - 1;
  const double divisor = mode == StdMode::population ? others : others - 1;
  ZSeries out{std::vector<double>(volume.size(), kUndefinedZ)};
  if (divisor <= 0) return out;
  for (std::size_t t = 0; t < volume.size(); ++t) {
    const std::size_t pos = t % bpw;
    const std::size_t own = t / bpw;
    double sum = 0.0;
    for (std::size_t k = 0; k < static_cast<std::size_t>(weeks); ++k) {
      if (k != own) sum += volume[pos + k * bpw];
    }
    const double mean = sum / others;
    double ss = 0.0;
    for (std::size_t k = 0; k < static_cast<std::size_t>(weeks); ++k) {
      if (k == own) continue;
      const double d = volume[pos + k * bpw] - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / divisor);
    if (!negligible(sd, mean)) out.z[t] = (volume[t] - mean) / sd;
  }
  return out;
}

ZSeries compute_z(std::span<const double> volume, int bins_per_week, const VarianceOptions& options) {
  if (options.profile_mode == ProfileMode::leave_one_out) {
    return z_series_leave_one_out(volume, bins_per_week, options.std_mode);
  }
  return z_series(volume, weekly_profile(volume, bins_per_week, options.std_mode));
}

std::vector<Run> flag_variance_runs(const ZSeries& z, double z_thr, CellKey cell) {
  std::vector<Run> runs;
  const int n = static_cast<int>(z.size());
  int t = 0;
  while (t < n) {
    if (!(z.defined(t) && z.z[t] > z_thr)) {
      ++t;
      continue;
    }
    const int start = t;
    while (t < n && z.defined(t) && z.z[t] > z_thr) ++t;
    const int stop = t - 1;
    if (stop > start) {
      Run run{cell, start, stop, std::vector<int>(stop - start + 1), {}};
      std::iota(run.flagged_variance.begin(), run.flagged_variance.end(), start);
      runs.push_back(std::move(run));
    }
  }
  return runs;
}

}  // namespace cdr
