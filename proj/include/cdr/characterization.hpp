#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cdr/ingestion.hpp"
#include "cdr/types.hpp"

namespace cdr {

/// Read-only view of a record set keyed by caller and by tower cell. User ids
/// are interned; every list is ordered by bin, then by file order.
class RecordIndex {
 public:
  struct Call {
    int bin = 0;
    std::uint32_t caller = 0;
    std::uint32_t callee = 0;
    CallKind kind = CallKind::voice;
  };

  RecordIndex(std::span<const CallRecord> records, const TowerMap& towers, const TimeGrid& grid,
              double cell_size);

  const TimeGrid& grid() const { return grid_; }
  std::size_t user_count() const { return names_.size(); }
  const std::string& user_name(std::uint32_t user) const { return names_[user]; }
  std::optional<std::uint32_t> user_id(const std::string& name) const;
  const Call& call(std::uint32_t i) const { return calls_[i]; }

  std::span<const std::uint32_t> calls_by(std::uint32_t caller) const;
  std::span<const std::uint32_t> calls_in(CellKey cell) const;

  /// Number of calls placed by `caller` in bins [first, last].
  std::int64_t count_calls(std::uint32_t caller, int first, int last) const;

 private:
  TimeGrid grid_;
  std::vector<Call> calls_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::uint32_t> caller_offsets_;
  std::vector<std::uint32_t> caller_calls_;
  std::map<CellKey, std::vector<std::uint32_t>> cell_calls_;
};

/// Inclusive bin interval.
struct BinWindow {
  int first = 0;
  int last = 0;

  int size() const { return last - first + 1; }
};

enum class BaselineMode { weekly_mean, prior_week };

/// Expected volume over `window`: the mean of the same week positions in all
/// other weeks, or the same bins one week earlier (one week later when the
/// window sits in the first week).
std::vector<double> baseline_series(const LocationSeries& series, const TimeGrid& grid,
                                    BinWindow window, BaselineMode mode);

/// V_event - V_normal over `window`.
std::vector<double> anomalous_volume(const LocationSeries& series, const TimeGrid& grid,
                                     BinWindow window, BaselineMode mode);

/// Fraction of the window elapsed when the cumulative signed excess first
/// reaches half of its total. Each entry covers one bin, with the excess spread
/// uniformly inside it. Empty when the total is not positive.
std::optional<double> midpoint_fraction(std::span<const double> delta);

struct Ring {
  int index = 0;
  int cells = 0;
  double mean_distance = 0.0;  // km, over member cell centres
  double mean_delta = 0.0;     // per member cell
  double total_delta = 0.0;
};

struct DecayFit {
  std::optional<double> r_c;  // km
  double slope = 0.0;
  double intercept = 0.0;
  int rings_used = 0;
  std::string reason;  // why r_c is absent
};

/// Groups per-cell excess into rings of `ring_width` km by centre distance to
/// `epicenter`, ignoring cells beyond `max_radius` (<= 0 means no limit).
std::vector<Ring> ring_profile(const std::map<CellKey, double>& cell_excess, double cell_size,
                               Point epicenter, double ring_width, double max_radius = 0.0);

/// Least squares of ln(mean excess) on ring distance over rings with positive
/// excess; r_c = -1/slope. Needs three such rings and a decaying slope.
DecayFit fit_decay(std::span<const Ring> rings);

/// Total excess per cell over `window`.
std::map<CellKey, double> cell_excess(const LocationSeriesSet& set, BinWindow window,
                                      BaselineMode mode);

struct SpatialDecay {
  std::vector<Ring> rings;
  DecayFit fit;
};

SpatialDecay spatial_decay(const LocationSeriesSet& set, Point epicenter, BinWindow window,
                           double ring_width, BaselineMode mode, double max_radius = 0.0);

/// One social layer G_i over an analysis window.
struct PopulationLayer {
  int index = 0;
  std::vector<std::string> members;       // sorted
  std::vector<double> series;             // calls placed by members, per window bin
  std::vector<double> baseline_series;    // same, one week away
  std::vector<double> history_totals;     // window totals in every other whole week

  double total() const;
};

struct PopulationOptions {
  int depth = 3;
  bool propagate_texts = false;
};

/// G_0 are users placing any call from `cell` during `window`; G_i are users
/// first reached by calls of G_{i-1} members during the window. Returns no
/// layers when G_0 is empty, otherwise depth + 1 layers (later ones may be empty).
std::vector<PopulationLayer> extract_populations(const RecordIndex& index, CellKey cell,
                                                 BinWindow window, const PopulationOptions& options);

/// Mean midpoint fraction of (series - baseline_series) over layers where it is
/// defined.
std::optional<double> social_propagation_factor(std::span<const PopulationLayer> layers);

struct CharacterizationConfig {
  BaselineMode baseline = BaselineMode::weekly_mean;
  double ring_width = 1.0;
  double ring_max_radius = 20.0;
  int spatial_window_pad = 0;
  PopulationOptions populations;
};

struct CharacterizationReport {
  std::optional<double> f_mid;
  SpatialDecay spatial;
  std::optional<double> social_propagation;
  std::vector<PopulationLayer> layers;
  std::vector<double> delta;
  double total_calls = 0.0;  // event-cell volume over the anomaly
};

/// `set` should hold every tower cell, not only the active ones, so the rings
/// see the full neighbourhood.
CharacterizationReport characterize(const Anomaly& anomaly, const LocationSeriesSet& set,
                                    const RecordIndex& index, const CharacterizationConfig& config);

std::vector<CharacterizationReport> characterize_all(std::span<const Anomaly> anomalies,
                                                     const LocationSeriesSet& set,
                                                     const RecordIndex& index,
                                                     const CharacterizationConfig& config,
                                                     int jobs = 1);

}  // namespace cdr
