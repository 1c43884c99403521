#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cdr/characterization.hpp"
#include "cdr/features.hpp"
#include "cdr/ingestion.hpp"
#include "cdr/pca.hpp"
#include "cdr/recurrence_detector.hpp"
#include "cdr/synthgen.hpp"

namespace cdr {

using Json = nlohmann::ordered_json;

Json to_json(const TimeGrid& grid);
TimeGrid time_grid_from_json(const Json& j);

/// {time_grid, cell_size, cells: [{ix, iy, volume: [...]}]}
Json to_json(const LocationSeriesSet& set);
LocationSeriesSet series_set_from_json(const Json& j);

/// One entry of the anomaly list: {cell, t_start, t_stop, duration_min,
/// epicenter_km, flags: {variance, recurrence}}.
Json to_json(const Anomaly& a, const TimeGrid& grid);
Anomaly anomaly_from_json(const Json& j, const TimeGrid& grid);

/// {tau, width, bins: [{i, j, count}]}
Json to_json(const RecurrenceHistogram& h);

/// Characterisation of one anomaly, including its nine features.
Json to_json(const Anomaly& a, const CharacterizationReport& report, const FeatureVector& features,
             const TimeGrid& grid);

/// {means, scales, columns, dropped, components, explained_variance}
Json to_json(const PcaResult& r, std::span<const std::string> column_names);

/// Ground-truth manifest written next to a synthetic dataset.
Json to_json(const GroundTruth& truth);

/// Provenance block: tool version, effective config and, unless disabled, the
/// wall-clock time.
Json metadata(const std::vector<std::pair<std::string, std::string>>& config, bool with_timestamp);

/// NaN and empty optionals become null.
Json number_or_null(double v);
Json number_or_null(const std::optional<double>& v);
double number_or_nan(const Json& j);

}  // namespace cdr
