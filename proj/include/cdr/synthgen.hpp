#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cdr/ingestion.hpp"
#include "cdr/types.hpp"

namespace cdr {

/// Seeded random source with platform-independent transforms: the raw stream
/// is std::mt19937_64 (fully specified by the standard) and every distribution
/// below is implemented here rather than taken from <random>.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer on [0, n). `n` must be positive.
  std::uint64_t below(std::uint64_t n);
  /// Poisson variate: inversion for small means, PTRS (Hormann 1993) otherwise.
  std::int64_t poisson(double mean);
  /// Standard normal by Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
};

enum class PulseShape { instant_decay, ramp, plateau };

std::string_view to_string(PulseShape shape);
PulseShape parse_pulse_shape(std::string_view text);

/// Relative intensity of the `k`th of `duration` bins; peaks at 1.
double pulse_weight(PulseShape shape, int k, int duration);

/// One planted anomaly.
struct InjectionSpec {
  CellKey cell;
  int onset = 0;                 // bin
  int duration = 10;             // bins
  double amplitude = 5.0;        // multiples of the epicentre's Poisson sigma
  PulseShape shape = PulseShape::plateau;
  double r_c_km = 1.0;
  int eyewitnesses = 20;
  int cascade_depth = 3;
  int cascade_delay = 2;         // bins between successive layers
  int branching = 2;
};

struct SynthConfig {
  std::uint64_t seed = 1;
  int weeks = 8;
  Timestamp origin = Timestamp{std::chrono::sys_days{std::chrono::year{2024} / 1 / 1}};
  seconds bin_width = minutes{10};
  minutes utc_offset = minutes{0};
  int nx = 2;
  int ny = 2;
  double cell_size = 1.0;
  int towers_per_cell = 2;
  double base_rate = 100.0;   // events per bin per cell at unit multipliers
  double rate_spread = 0.2;   // per-cell multiplier drawn from [1 - s, 1 + s]
  std::array<double, 24> hour_profile = default_hour_profile();
  std::array<double, 7> day_profile = {1.0, 1.0, 1.0, 1.0, 1.05, 1.1, 0.9};
  int users_per_cell = 400;
  double text_fraction = 0.3;
  std::vector<InjectionSpec> events;

  static std::array<double, 24> default_hour_profile();
  TimeGrid grid() const;
  /// Throws ConfigError on inconsistent settings (events outside the grid or span, ...).
  void validate() const;
};

/// What was planted, for scoring detector output.
struct InjectedEvent {
  int id = 0;
  InjectionSpec spec;
  int t_start = 0;
  int t_stop = 0;
  Point epicenter;
  std::map<CellKey, std::int64_t> injected_calls;
  std::map<CellKey, double> expected_calls;
  std::vector<std::vector<std::string>> cascade;  // planted G_0, G_1, ...
};

struct GroundTruth {
  std::uint64_t seed = 0;
  TimeGrid grid;
  double cell_size = 1.0;
  std::map<CellKey, std::vector<double>> baseline_rate;  // expected counts per bin
  std::vector<InjectedEvent> events;
};

struct SynthDataset {
  std::vector<CallRecord> records;  // ordered by timestamp
  TowerMap towers;
  GroundTruth truth;
};

/// Draws a dataset. Identical configs give identical datasets.
SynthDataset generate(const SynthConfig& config);

}  // namespace cdr
