#include "cdr/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cdr {

namespace {

std::vector<double> totals_of(std::span<const PopulationLayer> layers) {
  std::vector<double> totals;
  for (const auto& layer : layers) totals.push_back(layer.total());
  return totals;
}

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

double or_missing(const std::optional<double>& v) { return v ? *v : kMissing; }

}  // namespace

std::optional<double> social_decay_rate(std::span<const double> layer_totals) {
  double sum = 0.0;
  int used = 0;
  for (std::size_t i = 1; i < layer_totals.size(); ++i) {
    if (layer_totals[i - 1] == 0.0) continue;
    sum += layer_totals[i] / layer_totals[i - 1];
    ++used;
  }
  if (used == 0) return std::nullopt;
  return sum / used;
}

std::optional<double> social_decay_rate(std::span<const PopulationLayer> layers) {
  return social_decay_rate(totals_of(layers));
}

std::optional<double> weighted_social_distance(std::span<const double> layer_totals) {
  double weighted = 0.0, total = 0.0;
  for (std::size_t i = 0; i < layer_totals.size(); ++i) {
    weighted += static_cast<double>(i) * layer_totals[i];
    total += layer_totals[i];
  }
  if (!(total > 0.0)) return std::nullopt;
  return weighted / total;
}

std::optional<double> weighted_social_distance(std::span<const PopulationLayer> layers) {
  return weighted_social_distance(totals_of(layers));
}

std::optional<double> layer_zscore(double event_total, std::span<const double> history) {
  if (history.size() < 2) return std::nullopt;
  const double n = static_cast<double>(history.size());
  const double mean = std::accumulate(history.begin(), history.end(), 0.0) / n;
  double ss = 0.0;
  for (double h : history) ss += (h - mean) * (h - mean);
  const double sd = std::sqrt(ss / n);
  if (!(sd > 0.0)) return std::nullopt;
  return (event_total - mean) / sd;
}

std::optional<double> social_zscore(std::span<const PopulationLayer> layers) {
  double sum = 0.0;
  int used = 0;
  for (const auto& layer : layers) {
    if (auto z = layer_zscore(layer.total(), layer.history_totals)) {
      sum += *z;
      ++used;
    }
  }
  if (used == 0) return std::nullopt;
  return sum / used;
}

FeatureVector FeatureVector::from(const Anomaly& anomaly, const CharacterizationReport& report,
                                  const TimeGrid& grid) {
  FeatureVector f;
  f.values = {or_missing(report.spatial.fit.r_c),
              or_missing(report.f_mid),
              grid.hour_of_day(anomaly.run.t_start),
              anomaly.duration_bins * grid.bin_minutes(),
              report.total_calls,
              report.layers.empty() ? 0.0 : static_cast<double>(report.layers.front().members.size()),
              or_missing(social_decay_rate(report.layers)),
              or_missing(social_zscore(report.layers)),
              or_missing(weighted_social_distance(report.layers))};
  return f;
}

FeatureMatrix impute_median(std::span<const FeatureVector> features) {
  FeatureMatrix m;
  for (const auto& f : features) {
    m.rows.push_back(f.values);
    std::array<bool, kFeatureCount> mask{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) mask[j] = std::isnan(f.values[j]);
    m.imputed.push_back(mask);
  }
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    std::vector<double> measured;
    for (const auto& row : m.rows) {
      if (!std::isnan(row[j])) measured.push_back(row[j]);
    }
    double median = 0.0;
    if (!measured.empty()) {
      std::sort(measured.begin(), measured.end());
      const std::size_t h = measured.size() / 2;
      median = measured.size() % 2 == 1 ? measured[h] : 0.5 * (measured[h - 1] + measured[h]);
    }
    for (auto& row : m.rows) {
      if (std::isnan(row[j])) row[j] = median;
    }
  }
  return m;
}

}  // namespace cdr
