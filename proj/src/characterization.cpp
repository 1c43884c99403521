#include "cdr/characterization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "cdr/error.hpp"
#include "cdr/parallel.hpp"

namespace cdr {

RecordIndex::RecordIndex(std::span<const CallRecord> records, const TowerMap& towers,
                         const TimeGrid& grid, double cell_size)
    : grid_(grid) {
  std::unordered_map<std::string_view, CellKey> tower_cell;
  for (const auto& [id, p] : towers) tower_cell.emplace(id, GridCell::containing(p, cell_size).key);

  auto intern = [this](const std::string& name) {
    auto [it, inserted] = ids_.emplace(name, static_cast<std::uint32_t>(names_.size()));
    if (inserted) names_.push_back(name);
    return it->second;
  };

  std::vector<CellKey> cells;
  calls_.reserve(records.size());
  cells.reserve(records.size());
  for (const auto& r : records) {
    auto it = tower_cell.find(r.tower_id);
    if (it == tower_cell.end()) throw DataError("record references unknown tower " + r.tower_id);
    calls_.push_back(Call{grid.bin_index(r.timestamp), intern(r.caller_id), intern(r.callee_id), r.kind});
    cells.push_back(it->second);
  }

  std::vector<std::uint32_t> order(calls_.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [this](std::uint32_t a, std::uint32_t b) { return calls_[a].bin < calls_[b].bin; });

  caller_offsets_.assign(names_.size() + 1, 0);
  for (const auto& c : calls_) ++caller_offsets_[c.caller + 1];
  std::partial_sum(caller_offsets_.begin(), caller_offsets_.end(), caller_offsets_.begin());
  caller_calls_.resize(calls_.size());
  std::vector<std::uint32_t> fill(caller_offsets_.begin(), caller_offsets_.end() - 1);
  for (std::uint32_t i : order) {
    caller_calls_[fill[calls_[i].caller]++] = i;
    cell_calls_[cells[i]].push_back(i);
  }
}

std::optional<std::uint32_t> RecordIndex::user_id(const std::string& name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::span<const std::uint32_t> RecordIndex::calls_by(std::uint32_t caller) const {
  return std::span<const std::uint32_t>(caller_calls_)
      .subspan(caller_offsets_[caller], caller_offsets_[caller + 1] - caller_offsets_[caller]);
}

std::span<const std::uint32_t> RecordIndex::calls_in(CellKey cell) const {
  auto it = cell_calls_.find(cell);
  if (it == cell_calls_.end()) return {};
  return it->second;
}

namespace {

// Sub-span of `calls` (ordered by bin) with bins in [first, last].
std::span<const std::uint32_t> in_window(const RecordIndex& index,
                                         std::span<const std::uint32_t> calls, int first, int last) {
  auto bin_less = [&](std::uint32_t i, int bin) { return index.call(i).bin < bin; };
  auto lo = std::lower_bound(calls.begin(), calls.end(), first, bin_less);
  auto hi = std::lower_bound(lo, calls.end(), last + 1, bin_less);
  return {lo, hi};
}

}  // namespace

std::int64_t RecordIndex::count_calls(std::uint32_t caller, int first, int last) const {
  return static_cast<std::int64_t>(in_window(*this, calls_by(caller), first, last).size());
}

std::vector<double> baseline_series(const LocationSeries& series, const TimeGrid& grid,
                                    BinWindow window, BaselineMode mode) {
  const int bpw = grid.bins_per_week();
  const int weeks = grid.weeks();
  if (weeks < 2) throw ConfigError("a baseline needs at least two weeks of data");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(window.size()));
  for (int t = window.first; t <= window.last; ++t) {
    const int pos = grid.week_position(t);
    if (mode == BaselineMode::prior_week) {
      out.push_back(series.volume[static_cast<std::size_t>(t >= bpw ? t - bpw : t + bpw)]);
      continue;
    }
    const int own = t / bpw;
    double sum = 0.0;
    for (int k = 0; k < weeks; ++k) {
      if (k != own) sum += series.volume[static_cast<std::size_t>(pos + k * bpw)];
    }
    out.push_back(sum / (weeks - 1));
  }
  return out;
}

std::vector<double> anomalous_volume(const LocationSeries& series, const TimeGrid& grid,
                                     BinWindow window, BaselineMode mode) {
  auto delta = baseline_series(series, grid, window, mode);
  for (int t = window.first; t <= window.last; ++t) {
    auto& d = delta[static_cast<std::size_t>(t - window.first)];
    d = series.volume[static_cast<std::size_t>(t)] - d;
  }
  return delta;
}

std::optional<double> midpoint_fraction(std::span<const double> delta) {
  const double total = std::accumulate(delta.begin(), delta.end(), 0.0);
  if (delta.empty() || !(total > 0.0)) return std::nullopt;
  const double half = total / 2.0;
  double cum = 0.0;
  for (std::size_t k = 0; k < delta.size(); ++k) {
    const double next = cum + delta[k];
    if (next >= half && delta[k] > 0.0) {
      const double x = static_cast<double>(k) + (half - cum) / delta[k];
      return x / static_cast<double>(delta.size());
    }
    cum = next;
  }
  return std::nullopt;
}

std::vector<Ring> ring_profile(const std::map<CellKey, double>& cell_excess, double cell_size,
                               Point epicenter, double ring_width, double max_radius) {
  if (!(ring_width > 0.0)) throw ConfigError("ring_width must be positive");
  std::map<int, Ring> rings;
  for (const auto& [key, excess] : cell_excess) {
    const double d = distance(GridCell{key, cell_size}.center(), epicenter);
    if (max_radius > 0.0 && d > max_radius) continue;
    const int k = static_cast<int>(std::floor(d / ring_width));
    Ring& ring = rings[k];
    ring.index = k;
    ++ring.cells;
    ring.mean_distance += d;
    ring.total_delta += excess;
  }
  std::vector<Ring> out;
  for (auto& [k, ring] : rings) {
    ring.mean_distance /= ring.cells;
    ring.mean_delta = ring.total_delta / ring.cells;
    out.push_back(ring);
  }
  return out;
}

DecayFit fit_decay(std::span<const Ring> rings) {
  DecayFit fit;
  std::vector<double> xs, ys;
  for (const auto& r : rings) {
    if (r.mean_delta > 0.0) {
      xs.push_back(r.mean_distance);
      ys.push_back(std::log(r.mean_delta));
    }
  }
  fit.rings_used = static_cast<int>(xs.size());
  if (xs.size() < 3) {
    fit.reason = "fewer than 3 rings with positive excess";
    return fit;
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // Decay lengths beyond 1e6 km are numerically flat.
  if (!(fit.slope < -1e-6)) {
    fit.reason = "excess does not decay with distance";
    return fit;
  }
  fit.r_c = -1.0 / fit.slope;
  return fit;
}

std::map<CellKey, double> cell_excess(const LocationSeriesSet& set, BinWindow window,
                                      BaselineMode mode) {
  std::map<CellKey, double> out;
  for (const auto& [key, series] : set.cells) {
    const auto delta = anomalous_volume(series, set.grid, window, mode);
    out.emplace(key, std::accumulate(delta.begin(), delta.end(), 0.0));
  }
  return out;
}

SpatialDecay spatial_decay(const LocationSeriesSet& set, Point epicenter, BinWindow window,
                           double ring_width, BaselineMode mode, double max_radius) {
  SpatialDecay out;
  out.rings = ring_profile(cell_excess(set, window, mode), set.cell_size, epicenter, ring_width,
                           max_radius);
  out.fit = fit_decay(out.rings);
  return out;
}

double PopulationLayer::total() const { return std::accumulate(series.begin(), series.end(), 0.0); }

std::vector<PopulationLayer> extract_populations(const RecordIndex& index, CellKey cell,
                                                 BinWindow window, const PopulationOptions& options) {
  if (options.depth < 1) throw ConfigError("population depth must be at least 1");
  const TimeGrid& grid = index.grid();
  const int bpw = grid.bins_per_week();
  const int total_bins = grid.total_bins();
  window.first = std::max(window.first, 0);
  window.last = std::min(window.last, total_bins - 1);

  std::vector<std::vector<std::uint32_t>> layers;
  std::set<std::uint32_t> g0;
  for (std::uint32_t i : in_window(index, index.calls_in(cell), window.first, window.last)) {
    g0.insert(index.call(i).caller);
  }
  if (g0.empty()) return {};
  std::vector<char> reached(index.user_count(), 0);
  for (auto u : g0) reached[u] = 1;
  layers.emplace_back(g0.begin(), g0.end());
  for (int depth = 1; depth <= options.depth; ++depth) {
    std::set<std::uint32_t> next;
    for (auto u : layers.back()) {
      for (std::uint32_t i : in_window(index, index.calls_by(u), window.first, window.last)) {
        const auto& c = index.call(i);
        if (c.kind == CallKind::text && !options.propagate_texts) continue;
        if (!reached[c.callee]) next.insert(c.callee);
      }
    }
    for (auto u : next) reached[u] = 1;
    layers.emplace_back(next.begin(), next.end());
  }

  const int shift = window.first >= bpw ? -bpw : bpw;
  const int own_week = window.first / bpw;
  std::vector<PopulationLayer> out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    PopulationLayer layer;
    layer.index = static_cast<int>(i);
    layer.series.assign(static_cast<std::size_t>(window.size()), 0.0);
    layer.baseline_series.assign(static_cast<std::size_t>(window.size()), 0.0);
    std::vector<double> history(static_cast<std::size_t>(grid.weeks()), 0.0);
    for (auto u : layers[i]) {
      layer.members.push_back(index.user_name(u));
      for (std::uint32_t c : in_window(index, index.calls_by(u), window.first, window.last)) {
        layer.series[static_cast<std::size_t>(index.call(c).bin - window.first)] += 1.0;
      }
      for (std::uint32_t c :
           in_window(index, index.calls_by(u), window.first + shift, window.last + shift)) {
        layer.baseline_series[static_cast<std::size_t>(index.call(c).bin - shift - window.first)] += 1.0;
      }
      for (int k = 0; k < grid.weeks(); ++k) {
        const int off = (k - own_week) * bpw;
        if (k == own_week || window.first + off < 0 || window.last + off >= total_bins) continue;
        history[static_cast<std::size_t>(k)] +=
            static_cast<double>(index.count_calls(u, window.first + off, window.last + off));
      }
    }
    std::sort(layer.members.begin(), layer.members.end());
    for (int k = 0; k < grid.weeks(); ++k) {
      const int off = (k - own_week) * bpw;
      if (k == own_week || window.first + off < 0 || window.last + off >= total_bins) continue;
      layer.history_totals.push_back(history[static_cast<std::size_t>(k)]);
    }
    out.push_back(std::move(layer));
  }
  return out;
}

std::optional<double> social_propagation_factor(std::span<const PopulationLayer> layers) {
  double sum = 0.0;
  int defined = 0;
  for (const auto& layer : layers) {
    std::vector<double> delta(layer.series.size());
    for (std::size_t t = 0; t < delta.size(); ++t) delta[t] = layer.series[t] - layer.baseline_series[t];
    if (auto f = midpoint_fraction(delta)) {
      sum += *f;
      ++defined;
    }
  }
  if (defined == 0) return std::nullopt;
  return sum / defined;
}

CharacterizationReport characterize(const Anomaly& anomaly, const LocationSeriesSet& set,
                                    const RecordIndex& index, const CharacterizationConfig& config) {
  const Run& run = anomaly.run;
  const LocationSeries* series = set.find(run.cell);
  if (series == nullptr) {
    throw DataError("no series for anomaly cell (" + std::to_string(run.cell.ix) + ", " +
                    std::to_string(run.cell.iy) + ")");
  }
  const BinWindow window{run.t_start, run.t_stop};
  CharacterizationReport report;
  report.delta = anomalous_volume(*series, set.grid, window, config.baseline);
  report.f_mid = midpoint_fraction(report.delta);
  for (int t = window.first; t <= window.last; ++t) {
    report.total_calls += series->volume[static_cast<std::size_t>(t)];
  }
  const BinWindow spatial_window{std::max(0, window.first - config.spatial_window_pad),
                                 std::min(set.grid.total_bins() - 1, window.last + config.spatial_window_pad)};
  report.spatial = spatial_decay(set, anomaly.epicenter, spatial_window, config.ring_width,
                                 config.baseline, config.ring_max_radius);
  report.layers = extract_populations(index, run.cell, window, config.populations);
  report.social_propagation = social_propagation_factor(report.layers);
  return report;
}

std::vector<CharacterizationReport> characterize_all(std::span<const Anomaly> anomalies,
                                                     const LocationSeriesSet& set,
                                                     const RecordIndex& index,
                                                     const CharacterizationConfig& config, int jobs) {
  std::vector<CharacterizationReport> out(anomalies.size());
  parallel_for(anomalies.size(), jobs,
               [&](std::size_t i) { out[i] = characterize(anomalies[i], set, index, config); });
  return out;
}

}  // namespace cdr
