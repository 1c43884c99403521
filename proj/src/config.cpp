#include "cdr/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "cdr/error.hpp"

namespace cdr {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  }
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) { return static_cast<int>(to_long(key, v)); }

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("'" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

const char* kWeekdays[] = {"monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"};

}  // namespace

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    cfg.entries_.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  return parse(in);
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  std::optional<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (k == key) out = v;
  }
  return out;
}

std::vector<std::string> KeyValueConfig::get_all(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (k == key) out.push_back(v);
  }
  return out;
}

Settings Settings::from(const KeyValueConfig& config) {
  Settings s;
  for (const auto& [key, v] : config.entries()) {
    if (key.rfind("synth.", 0) == 0) continue;
    if (key == "bin_width") {
      s.bin_width_min = to_double(key, v);
    } else if (key == "cell_size") {
      s.cell_size = to_double(key, v);
    } else if (key == "origin") {
      s.origin = v;
    } else if (key == "weeks") {
      s.weeks = to_int(key, v);
    } else if (key == "week_start") {
      unsigned day = 0;
      for (unsigned i = 0; i < 7; ++i) {
        if (v == kWeekdays[i]) day = i + 1;
      }
      if (day == 0) throw ConfigError("unknown week_start '" + v + "'");
      s.week_start = day;
    } else if (key == "utc_offset") {
      s.utc_offset_min = to_int(key, v);
    } else if (key == "strict") {
      s.strict = to_bool(key, v);
    } else if (key == "min_rate") {
      s.min_rate = to_double(key, v);
    } else if (key == "z_thr") {
      s.detector.variance.z_thr = to_double(key, v);
    } else if (key == "std_mode") {
      if (v == "population") {
        s.detector.variance.std_mode = StdMode::population;
      } else if (v == "sample") {
        s.detector.variance.std_mode = StdMode::sample;
      } else {
        throw ConfigError("std_mode must be population or sample");
      }
    } else if (key == "profile_mode") {
      if (v == "leave-one-out") {
        s.detector.variance.profile_mode = ProfileMode::leave_one_out;
      } else if (v == "self-inclusive") {
        s.detector.variance.profile_mode = ProfileMode::self_inclusive;
      } else {
        throw ConfigError("profile_mode must be leave-one-out or self-inclusive");
      }
    } else if (key == "phase_bin_width") {
      s.detector.recurrence.phase_bin_width = to_double(key, v);
    } else if (key == "p_thr") {
      if (v == "auto") {
        s.detector.recurrence.p_thr.reset();
      } else {
        s.detector.recurrence.p_thr = to_double(key, v);
      }
    } else if (key == "merge_gap") {
      s.detector.merge.max_gap = to_int(key, v);
    } else if (key == "merge_len") {
      s.detector.merge.min_long = to_int(key, v);
    } else if (key == "min_duration") {
      s.detector.min_duration = to_int(key, v);
    } else if (key == "baseline_mode") {
      if (v == "weekly-mean") {
        s.characterization.baseline = BaselineMode::weekly_mean;
      } else if (v == "prior-week") {
        s.characterization.baseline = BaselineMode::prior_week;
      } else {
        throw ConfigError("baseline_mode must be weekly-mean or prior-week");
      }
    } else if (key == "ring_width") {
      s.characterization.ring_width = to_double(key, v);
    } else if (key == "ring_max_radius") {
      s.characterization.ring_max_radius = to_double(key, v);
    } else if (key == "spatial_window_pad") {
      s.characterization.spatial_window_pad = to_int(key, v);
    } else if (key == "depth") {
      s.characterization.populations.depth = to_int(key, v);
    } else if (key == "propagate_texts") {
      s.characterization.populations.propagate_texts = to_bool(key, v);
    } else if (key == "spatial_dedup_radius") {
      s.spatial_dedup_radius = to_double(key, v);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  if (!(s.bin_width_min > 0.0)) throw ConfigError("bin_width must be positive");
  if (!(s.cell_size > 0.0)) throw ConfigError("cell_size must be positive");
  if (s.min_rate < 0.0) throw ConfigError("min_rate must be >= 0");
  if (!(s.detector.recurrence.phase_bin_width > 0.0)) throw ConfigError("phase_bin_width must be positive");
  if (s.detector.min_duration < 1) throw ConfigError("min_duration must be >= 1");
  if (s.characterization.populations.depth < 1) throw ConfigError("depth must be >= 1");
  if (!(s.characterization.ring_width > 0.0)) throw ConfigError("ring_width must be positive");
  return s;
}

std::vector<std::pair<std::string, std::string>> Settings::effective() const {
  const auto& d = detector;
  const auto& c = characterization;
  return {
      {"bin_width", format_number(bin_width_min)},
      {"cell_size", format_number(cell_size)},
      {"origin", origin.value_or("auto")},
      {"weeks", weeks == 0 ? "auto" : std::to_string(weeks)},
      {"week_start", kWeekdays[week_start - 1]},
      {"utc_offset", std::to_string(utc_offset_min)},
      {"strict", strict ? "true" : "false"},
      {"min_rate", format_number(min_rate)},
      {"z_thr", format_number(d.variance.z_thr)},
      {"std_mode", d.variance.std_mode == StdMode::population ? "population" : "sample"},
      {"profile_mode",
       d.variance.profile_mode == ProfileMode::leave_one_out ? "leave-one-out" : "self-inclusive"},
      {"phase_bin_width", format_number(d.recurrence.phase_bin_width)},
      {"p_thr", d.recurrence.p_thr ? format_number(*d.recurrence.p_thr) : "auto"},
      {"merge_gap", std::to_string(d.merge.max_gap)},
      {"merge_len", std::to_string(d.merge.min_long)},
      {"min_duration", std::to_string(d.min_duration)},
      {"baseline_mode", c.baseline == BaselineMode::weekly_mean ? "weekly-mean" : "prior-week"},
      {"ring_width", format_number(c.ring_width)},
      {"ring_max_radius", format_number(c.ring_max_radius)},
      {"spatial_window_pad", std::to_string(c.spatial_window_pad)},
      {"depth", std::to_string(c.populations.depth)},
      {"propagate_texts", c.populations.propagate_texts ? "true" : "false"},
      {"spatial_dedup_radius", format_number(spatial_dedup_radius)},
  };
}

SynthConfig synth_config_from(const KeyValueConfig& config) {
  SynthConfig s;
  for (const auto& [key, v] : config.entries()) {
    if (key.rfind("synth.", 0) != 0) continue;
    const std::string name = key.substr(6);
    if (name == "seed") {
      s.seed = static_cast<std::uint64_t>(to_long(key, v));
    } else if (name == "weeks") {
      s.weeks = to_int(key, v);
    } else if (name == "origin") {
      s.origin = parse_timestamp(v);
    } else if (name == "utc_offset") {
      s.utc_offset = minutes{to_int(key, v)};
    } else if (name == "bin_width") {
      s.bin_width = seconds{static_cast<long>(to_double(key, v) * 60.0)};
    } else if (name == "nx") {
      s.nx = to_int(key, v);
    } else if (name == "ny") {
      s.ny = to_int(key, v);
    } else if (name == "cell_size") {
      s.cell_size = to_double(key, v);
    } else if (name == "towers_per_cell") {
      s.towers_per_cell = to_int(key, v);
    } else if (name == "base_rate") {
      s.base_rate = to_double(key, v);
    } else if (name == "rate_spread") {
      s.rate_spread = to_double(key, v);
    } else if (name == "users_per_cell") {
      s.users_per_cell = to_int(key, v);
    } else if (name == "text_fraction") {
      s.text_fraction = to_double(key, v);
    } else if (name == "hour_profile" || name == "day_profile") {
      const auto items = split_list(v);
      const std::size_t want = name == "hour_profile" ? 24 : 7;
      if (items.size() != want) {
        throw ConfigError("'" + key + "' needs " + std::to_string(want) + " values");
      }
      for (std::size_t i = 0; i < want; ++i) {
        (name == "hour_profile" ? s.hour_profile[i] : s.day_profile[i]) = to_double(key, items[i]);
      }
    } else if (name == "event") {
      const auto f = split_list(v);
      if (f.size() < 4 || f.size() > 10) throw ConfigError("'synth.event' needs 4 to 10 fields");
      InjectionSpec e;
      e.cell = {to_int(key, f[0]), to_int(key, f[1])};
      e.onset = to_int(key, f[2]);
      e.duration = to_int(key, f[3]);
      if (f.size() > 4) e.amplitude = to_double(key, f[4]);
      if (f.size() > 5) e.shape = parse_pulse_shape(f[5]);
      if (f.size() > 6) e.r_c_km = to_double(key, f[6]);
      if (f.size() > 7) e.cascade_depth = to_int(key, f[7]);
      if (f.size() > 8) e.cascade_delay = to_int(key, f[8]);
      if (f.size() > 9) e.branching = to_int(key, f[9]);
      s.events.push_back(e);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return s;
}

}  // namespace cdr
