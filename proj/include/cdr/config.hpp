#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdr/assembler.hpp"
#include "cdr/characterization.hpp"
#include "cdr/synthgen.hpp"

namespace cdr {

/// Ordered `key = value` pairs. `#` starts a comment; blank lines are ignored.
/// A key may repeat (later values override for scalar settings; list settings
/// such as `synth.event` collect every occurrence).
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  std::optional<std::string> get(const std::string& key) const;
  std::vector<std::string> get_all(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Every tunable of the pipeline, with its default.
struct Settings {
  // grid
  double bin_width_min = 10.0;
  double cell_size = 1.0;
  std::optional<std::string> origin;  // ISO-8601; inferred from the records when absent
  int weeks = 0;                      // 0 = inferred
  unsigned week_start = 1;            // ISO weekday, 1 = Monday
  int utc_offset_min = 0;
  bool strict = false;

  double min_rate = 1.0;  // events per minute
  DetectorConfig detector;
  CharacterizationConfig characterization;
  double spatial_dedup_radius = 0.0;  // km, 0 = off; reporting only

  /// Applies every recognised key; unknown keys (outside the `synth.` namespace)
  /// throw ConfigError.
  static Settings from(const KeyValueConfig& config);

  /// Effective values, in a stable order, for provenance echoes.
  std::vector<std::pair<std::string, std::string>> effective() const;
};

/// Reads `synth.*` keys on top of the SynthConfig defaults. Each `synth.event`
/// value is `ix,iy,onset,duration[,amplitude[,shape[,r_c[,depth[,delay[,branching]]]]]]`.
SynthConfig synth_config_from(const KeyValueConfig& config);

std::string format_number(double v);

}  // namespace cdr
