#include "cdr/json_io.hpp"

#include <cmath>
#include <limits>

#include "cdr/error.hpp"

namespace cdr {

namespace {

constexpr const char* kToolName = "cdr-anomaly";
constexpr const char* kToolVersion = "0.1.0";

Json cell_json(CellKey key) { return Json{{"ix", key.ix}, {"iy", key.iy}}; }

CellKey cell_from(const Json& j) { return {j.at("ix").get<std::int32_t>(), j.at("iy").get<std::int32_t>()}; }

}  // namespace

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json number_or_null(const std::optional<double>& v) { return v ? number_or_null(*v) : Json(nullptr); }

double number_or_nan(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

Json to_json(const TimeGrid& grid) {
  return Json{{"origin", format_timestamp(grid.origin(), grid.utc_offset())},
              {"weeks", grid.weeks()},
              {"bin_width_s", grid.bin_width().count()},
              {"bins_per_week", grid.bins_per_week()},
              {"total_bins", grid.total_bins()},
              {"utc_offset_min", grid.utc_offset().count()},
              {"week_start", grid.week_start()}};
}

TimeGrid time_grid_from_json(const Json& j) {
  try {
    return TimeGrid(parse_timestamp(j.at("origin").get<std::string>()), j.at("weeks").get<int>(),
                    seconds{j.at("bin_width_s").get<long>()}, minutes{j.value("utc_offset_min", 0L)},
                    j.value("week_start", 1u));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad time_grid: ") + e.what());
  }
}

Json to_json(const LocationSeriesSet& set) {
  Json cells = Json::array();
  for (const auto& [key, series] : set.cells) {
    cells.push_back(Json{{"ix", key.ix}, {"iy", key.iy}, {"volume", series.volume}});
  }
  return Json{{"time_grid", to_json(set.grid)}, {"cell_size", set.cell_size}, {"cells", std::move(cells)}};
}

LocationSeriesSet series_set_from_json(const Json& j) {
  try {
    LocationSeriesSet set{time_grid_from_json(j.at("time_grid")), j.at("cell_size").get<double>(), {}};
    for (const auto& c : j.at("cells")) {
      const CellKey key = cell_from(c);
      LocationSeries s{GridCell{key, set.cell_size}, c.at("volume").get<std::vector<std::uint32_t>>()};
      if (static_cast<int>(s.volume.size()) != set.grid.total_bins()) {
        throw ParseError("series length does not match its time grid");
      }
      set.cells.emplace(key, std::move(s));
    }
    return set;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad series set: ") + e.what());
  }
}

Json to_json(const Anomaly& a, const TimeGrid& grid) {
  return Json{{"cell", cell_json(a.run.cell)},
              {"t_start", a.run.t_start},
              {"t_stop", a.run.t_stop},
              {"start_time", format_timestamp(grid.bin_interval(a.run.t_start).first, grid.utc_offset())},
              {"duration_min", a.duration_bins * grid.bin_minutes()},
              {"epicenter_km", Json::array({a.epicenter.x, a.epicenter.y})},
              {"flags", Json{{"variance", a.run.flagged_variance}, {"recurrence", a.run.flagged_recurrence}}}};
}

Anomaly anomaly_from_json(const Json& j, const TimeGrid& grid) {
  try {
    Anomaly a;
    a.run.cell = cell_from(j.at("cell"));
    a.run.t_start = j.at("t_start").get<int>();
    a.run.t_stop = j.at("t_stop").get<int>();
    if (a.run.t_start < 0 || a.run.t_stop >= grid.total_bins() || a.run.t_start > a.run.t_stop) {
      throw ParseError("anomaly window outside its time grid");
    }
    if (j.contains("flags")) {
      a.run.flagged_variance = j.at("flags").value("variance", std::vector<int>{});
      a.run.flagged_recurrence = j.at("flags").value("recurrence", std::vector<int>{});
    }
    a.duration_bins = a.run.length();
    const auto& e = j.at("epicenter_km");
    a.epicenter = {e.at(0).get<double>(), e.at(1).get<double>()};
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad anomaly entry: ") + e.what());
  }
}

Json to_json(const RecurrenceHistogram& h) {
  Json bins = Json::array();
  for (const auto& [bin, count] : h.counts) {
    bins.push_back(Json{{"i", bin.first}, {"j", bin.second}, {"count", count}});
  }
  return Json{{"tau", h.lag}, {"width", h.phase_bin_width}, {"n_points", h.n_points}, {"bins", std::move(bins)}};
}

Json to_json(const Anomaly& a, const CharacterizationReport& report, const FeatureVector& features,
             const TimeGrid& grid) {
  Json j = to_json(a, grid);
  j["f_mid"] = number_or_null(report.f_mid);
  j["r_c_km"] = number_or_null(report.spatial.fit.r_c);
  j["r_c_rings_used"] = report.spatial.fit.rings_used;
  j["r_c_reason"] = report.spatial.fit.reason;
  j["social_propagation_factor"] = number_or_null(report.social_propagation);
  j["total_calls"] = report.total_calls;
  Json layers = Json::array();
  for (const auto& layer : report.layers) {
    std::vector<double> delta(layer.series.size());
    for (std::size_t t = 0; t < delta.size(); ++t) delta[t] = layer.series[t] - layer.baseline_series[t];
    double baseline_total = 0.0;
    for (double b : layer.baseline_series) baseline_total += b;
    layers.push_back(Json{{"index", layer.index},
                          {"size", layer.members.size()},
                          {"total_calls", layer.total()},
                          {"baseline_calls", baseline_total},
                          {"f_mid", number_or_null(midpoint_fraction(delta))},
                          {"zscore", number_or_null(layer_zscore(layer.total(), layer.history_totals))}});
  }
  j["layers"] = std::move(layers);
  Json f = Json::object();
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    f[std::string(kFeatureNames[i])] = number_or_null(features.values[i]);
  }
  j["features"] = std::move(f);
  return j;
}

Json to_json(const PcaResult& r, std::span<const std::string> column_names) {
  auto name = [&](std::size_t c) {
    return c < column_names.size() ? column_names[c] : "col" + std::to_string(c);
  };
  Json columns = Json::array(), dropped = Json::array();
  for (auto c : r.columns) columns.push_back(name(c));
  for (auto c : r.dropped) dropped.push_back(name(c));
  return Json{{"columns", std::move(columns)},
              {"dropped", std::move(dropped)},
              {"means", r.means},
              {"scales", r.scales},
              {"components", r.components},
              {"explained_variance", r.explained_variance}};
}

Json to_json(const GroundTruth& truth) {
  Json events = Json::array();
  for (const auto& ev : truth.events) {
    Json injected = Json::array();
    for (const auto& [key, n] : ev.injected_calls) {
      injected.push_back(Json{{"ix", key.ix}, {"iy", key.iy}, {"calls", n},
                              {"expected", ev.expected_calls.at(key)}});
    }
    events.push_back(Json{
        {"id", ev.id},
        {"cell", cell_json(ev.spec.cell)},
        {"epicenter_km", Json::array({ev.epicenter.x, ev.epicenter.y})},
        {"t_start", ev.t_start},
        {"t_stop", ev.t_stop},
        {"start_time", format_timestamp(truth.grid.bin_interval(ev.t_start).first, truth.grid.utc_offset())},
        {"duration_bins", ev.spec.duration},
        {"amplitude_sigma", ev.spec.amplitude},
        {"shape", to_string(ev.spec.shape)},
        {"r_c_km", ev.spec.r_c_km},
        {"cascade", Json{{"depth", ev.spec.cascade_depth},
                         {"delay_bins", ev.spec.cascade_delay},
                         {"branching", ev.spec.branching},
                         {"layers", ev.cascade}}},
        {"injected", std::move(injected)}});
  }
  Json baseline = Json::array();
  for (const auto& [key, rate] : truth.baseline_rate) {
    double sum = 0.0;
    for (double r : rate) sum += r;
    baseline.push_back(Json{{"ix", key.ix}, {"iy", key.iy},
                            {"mean_calls_per_bin", rate.empty() ? 0.0 : sum / static_cast<double>(rate.size())}});
  }
  return Json{{"seed", truth.seed},
              {"time_grid", to_json(truth.grid)},
              {"cell_size", truth.cell_size},
              {"cells", truth.baseline_rate.size()},
              {"baseline", std::move(baseline)},
              {"events", std::move(events)}};
}

Json metadata(const std::vector<std::pair<std::string, std::string>>& config, bool with_timestamp) {
  Json cfg = Json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  Json j{{"tool", kToolName}, {"version", kToolVersion}, {"config", std::move(cfg)}};
  if (with_timestamp) {
    j["generated_at"] = format_timestamp(
        std::chrono::floor<seconds>(std::chrono::system_clock::now()));
  }
  return j;
}

}  // namespace cdr
