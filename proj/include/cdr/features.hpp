#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cdr/characterization.hpp"

namespace cdr {

/// Mean over i >= 1 of totals[i] / totals[i-1], skipping zero denominators.
std::optional<double> social_decay_rate(std::span<const double> layer_totals);
std::optional<double> social_decay_rate(std::span<const PopulationLayer> layers);

/// sum_i i * totals[i] / sum_i totals[i], with G_0 at index 0.
std::optional<double> weighted_social_distance(std::span<const double> layer_totals);
std::optional<double> weighted_social_distance(std::span<const PopulationLayer> layers);

/// z of one event-window total against the same window in other weeks
/// (population spread). Empty with fewer than two history weeks or no spread.
std::optional<double> layer_zscore(double event_total, std::span<const double> history);

/// Mean of the per-layer z-scores, skipping layers without one.
std::optional<double> social_zscore(std::span<const PopulationLayer> layers);

inline constexpr std::size_t kFeatureCount = 9;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "r_c_km",        "f_mid",        "time_of_day_h",     "duration_min",            "total_calls",
    "g0_size",       "social_decay_rate", "social_zscore", "weighted_social_distance"};

/// Nine per-anomaly measurements. NaN marks a value that could not be measured.
struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  static FeatureVector from(const Anomaly& anomaly, const CharacterizationReport& report,
                            const TimeGrid& grid);
};

struct FeatureMatrix {
  std::vector<std::array<double, kFeatureCount>> rows;
  std::vector<std::array<bool, kFeatureCount>> imputed;
};

/// Replaces NaNs with their column median (over measured rows) and records
/// which entries were filled. A column with no measured value is filled with 0.
FeatureMatrix impute_median(std::span<const FeatureVector> features);

}  // namespace cdr
