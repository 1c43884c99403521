#include "cdr/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>

#include "cdr/error.hpp"

namespace cdr {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

double Rng::normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::int64_t Rng::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  if (mean < 10.0) {
    const double limit = std::exp(-mean);
    std::int64_t k = 0;
    double p = uniform();
    while (p > limit) {
      ++k;
      p *= uniform();
    }
    return k;
  }
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::abs(u);
    const auto k = static_cast<std::int64_t>(std::floor((2.0 * a / us + b) * u + mean + 0.43));
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + static_cast<double>(k) * loglam - std::lgamma(static_cast<double>(k) + 1.0)) {
      return k;
    }
  }
}

std::string_view to_string(PulseShape shape) {
  switch (shape) {
    case PulseShape::instant_decay: return "instant-decay";
    case PulseShape::ramp: return "ramp";
    case PulseShape::plateau: return "plateau";
  }
  return "plateau";
}

PulseShape parse_pulse_shape(std::string_view text) {
  if (text == "instant-decay") return PulseShape::instant_decay;
  if (text == "ramp") return PulseShape::ramp;
  if (text == "plateau") return PulseShape::plateau;
  throw ConfigError("unknown pulse shape '" + std::string(text) + "'");
}

double pulse_weight(PulseShape shape, int k, int duration) {
  switch (shape) {
    case PulseShape::instant_decay: return std::exp(-3.0 * k / duration);
    case PulseShape::ramp: return static_cast<double>(k + 1) / duration;
    case PulseShape::plateau: return 1.0;
  }
  return 1.0;
}

std::array<double, 24> SynthConfig::default_hour_profile() {
  // Diurnal cycle with its trough before dawn and its peak in the evening.
  std::array<double, 24> p{};
  for (int h = 0; h < 24; ++h) {
    p[static_cast<std::size_t>(h)] = 1.0 + 0.5 * std::cos(2.0 * std::numbers::pi * (h + 0.5 - 19.0) / 24.0);
  }
  return p;
}

TimeGrid SynthConfig::grid() const { return TimeGrid(origin, weeks, bin_width, utc_offset); }

void SynthConfig::validate() const {
  const TimeGrid g = grid();
  if (weeks < 2) throw ConfigError("synthetic data needs at least two weeks");
  if (nx < 1 || ny < 1) throw ConfigError("synthetic grid needs at least one cell");
  if (!(cell_size > 0.0)) throw ConfigError("cell_size must be positive");
  if (towers_per_cell < 1) throw ConfigError("towers_per_cell must be at least 1");
  if (users_per_cell < 2) throw ConfigError("users_per_cell must be at least 2");
  if (!(base_rate >= 0.0) || rate_spread < 0.0 || rate_spread >= 1.0) {
    throw ConfigError("base_rate must be >= 0 and rate_spread in [0, 1)");
  }
  for (double m : hour_profile) {
    if (!(m >= 0.0)) throw ConfigError("hour profile multipliers must be >= 0");
  }
  for (double m : day_profile) {
    if (!(m >= 0.0)) throw ConfigError("day profile multipliers must be >= 0");
  }
  if (text_fraction < 0.0 || text_fraction > 1.0) throw ConfigError("text_fraction must be in [0, 1]");
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    const std::string which = "event " + std::to_string(i) + ": ";
    if (e.cell.ix < 0 || e.cell.ix >= nx || e.cell.iy < 0 || e.cell.iy >= ny) {
      throw ConfigError(which + "epicentre cell outside the synthetic grid");
    }
    if (e.duration < 1) throw ConfigError(which + "duration must be at least one bin");
    if (e.onset < 0 || e.onset + e.duration > g.total_bins()) {
      throw ConfigError(which + "window outside the time span");
    }
    if (!(e.amplitude > 0.0)) throw ConfigError(which + "amplitude must be positive");
    if (!(e.r_c_km > 0.0)) throw ConfigError(which + "r_c must be positive");
    if (e.eyewitnesses < 1 || e.cascade_depth < 0 || e.cascade_delay < 0 || e.branching < 1) {
      throw ConfigError(which + "invalid cascade parameters");
    }
  }
}

namespace {

struct SynthCell {
  CellKey key;
  Point center;
  double multiplier = 1.0;
  std::vector<std::string> towers;
  std::vector<std::string> residents;
};

}  // namespace

SynthDataset generate(const SynthConfig& config) {
  config.validate();
  const TimeGrid grid = config.grid();
  const auto bw = config.bin_width.count();
  Rng rng(config.seed);

  SynthDataset out{{}, {}, GroundTruth{config.seed, grid, config.cell_size, {}, {}}};

  std::vector<SynthCell> cells;
  std::vector<std::string> all_users;
  for (int ix = 0; ix < config.nx; ++ix) {
    for (int iy = 0; iy < config.ny; ++iy) {
      SynthCell c;
      c.key = {ix, iy};
      c.center = GridCell{c.key, config.cell_size}.center();
      c.multiplier = 1.0 + config.rate_spread * (2.0 * rng.uniform() - 1.0);
      const std::string tag = std::to_string(ix) + "_" + std::to_string(iy);
      for (int k = 0; k < config.towers_per_cell; ++k) {
        std::string id = "t" + tag + "_" + std::to_string(k);
        out.towers.emplace(id, Point{(ix + rng.uniform()) * config.cell_size,
                                     (iy + rng.uniform()) * config.cell_size});
        c.towers.push_back(std::move(id));
      }
      for (int k = 0; k < config.users_per_cell; ++k) {
        c.residents.push_back("u" + tag + "_" + std::to_string(k));
      }
      all_users.insert(all_users.end(), c.residents.begin(), c.residents.end());
      cells.push_back(std::move(c));
    }
  }

  auto place = [&](int bin, const std::string& caller, const std::string& callee,
                   const std::string& tower, CallKind kind) {
    const Timestamp ts = grid.bin_interval(bin).first +
                         seconds{static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(bw)))};
    out.records.push_back(CallRecord{ts, caller, callee, tower, kind});
  };
  auto random_callee = [&](const std::string& caller) -> const std::string& {
    for (;;) {
      const auto& u = all_users[rng.below(all_users.size())];
      if (u != caller) return u;
    }
  };

  const int total_bins = grid.total_bins();
  for (const auto& c : cells) {
    auto& rates = out.truth.baseline_rate[c.key];
    rates.resize(static_cast<std::size_t>(total_bins));
    for (int t = 0; t < total_bins; ++t) {
      const auto hour = static_cast<std::size_t>(grid.hour_of_day(t));
      const auto day = static_cast<std::size_t>(grid.day_of_week(t));
      rates[static_cast<std::size_t>(t)] = config.base_rate * c.multiplier *
                                           config.hour_profile[hour] * config.day_profile[day];
    }
  }

  // Planted cascade calls, scheduled up front: member j of G_i calls members
  // j*b .. j*b+b-1 of G_{i+1}, the eyewitnesses from the epicentre and later
  // layers from other cells (a later caller at the epicentre would be in G_0).
  struct Planned {
    int bin;
    const std::string* caller;
    const std::string* callee;
    const std::string* tower;
  };
  std::vector<Planned> planned;
  for (std::size_t e = 0; e < config.events.size(); ++e) {
    const InjectionSpec& spec = config.events[e];
    InjectedEvent ev;
    ev.id = static_cast<int>(e);
    ev.spec = spec;
    ev.t_start = spec.onset;
    ev.t_stop = spec.onset + spec.duration - 1;
    ev.epicenter = GridCell{spec.cell, config.cell_size}.center();
    const std::string prefix = "e" + std::to_string(e) + "_g";
    std::size_t layer_size = static_cast<std::size_t>(spec.eyewitnesses);
    for (int i = 0; i <= spec.cascade_depth; ++i) {
      std::vector<std::string> layer;
      for (std::size_t k = 0; k < layer_size; ++k) {
        layer.push_back(prefix + std::to_string(i) + "_" + std::to_string(k));
      }
      ev.cascade.push_back(std::move(layer));
      layer_size *= static_cast<std::size_t>(spec.branching);
    }
    for (const auto& c : cells) {
      ev.injected_calls[c.key] = 0;
      ev.expected_calls[c.key] = 0.0;
    }
    out.truth.events.push_back(std::move(ev));
  }
  for (auto& ev : out.truth.events) {
    const InjectionSpec& spec = ev.spec;
    const auto& epi_cell = *std::find_if(cells.begin(), cells.end(),
                                         [&](const SynthCell& c) { return c.key == spec.cell; });
    const int spread = std::max(1, spec.duration / 2);
    for (int i = 0; i < spec.cascade_depth; ++i) {
      const auto& from = ev.cascade[static_cast<std::size_t>(i)];
      const auto& to = ev.cascade[static_cast<std::size_t>(i + 1)];
      for (std::size_t j = 0; j < from.size(); ++j) {
        for (int b = 0; b < spec.branching; ++b) {
          const int t = std::min(total_bins - 1,
                                 spec.onset + i * spec.cascade_delay +
                                     static_cast<int>(rng.below(static_cast<std::uint64_t>(spread))));
          const SynthCell* cell = &epi_cell;
          if (i > 0 && cells.size() > 1) {
            do {
              cell = &cells[rng.below(cells.size())];
            } while (cell == &epi_cell);
          }
          planned.push_back({t, &from[j],
                             &to[j * static_cast<std::size_t>(spec.branching) + static_cast<std::size_t>(b)],
                             &cell->towers[rng.below(cell->towers.size())]});
        }
      }
    }
  }
  std::stable_sort(planned.begin(), planned.end(),
                   [](const Planned& a, const Planned& b) { return a.bin < b.bin; });

  // Records are drawn bin by bin so only each bin's batch needs sorting.
  auto next_planned = planned.begin();
  std::vector<std::size_t> order;
  std::vector<CallRecord> scratch;
  double expected_total = 0.0;
  for (const auto& [key, rates] : out.truth.baseline_rate) {
    for (double r : rates) expected_total += r;
  }
  out.records.reserve(static_cast<std::size_t>(expected_total * 1.01) + planned.size() + 1024);
  for (int t = 0; t < total_bins; ++t) {
    const std::size_t batch_start = out.records.size();
    for (const auto& c : cells) {
      const auto n = rng.poisson(out.truth.baseline_rate[c.key][static_cast<std::size_t>(t)]);
      for (std::int64_t i = 0; i < n; ++i) {
        const auto& caller = c.residents[rng.below(c.residents.size())];
        const CallKind kind = rng.uniform() < config.text_fraction ? CallKind::text : CallKind::voice;
        place(t, caller, random_callee(caller), c.towers[rng.below(c.towers.size())], kind);
      }
    }
    for (auto& ev : out.truth.events) {
      const InjectionSpec& spec = ev.spec;
      if (t < ev.t_start || t > ev.t_stop) continue;
      const int k = t - spec.onset;
      const double epi_rate = out.truth.baseline_rate.at(spec.cell)[static_cast<std::size_t>(t)];
      const auto& eyewitnesses = ev.cascade.front();
      for (const auto& c : cells) {
        const double extra = spec.amplitude * std::sqrt(epi_rate) *
                             pulse_weight(spec.shape, k, spec.duration) *
                             std::exp(-distance(c.center, ev.epicenter) / spec.r_c_km);
        const auto n = rng.poisson(extra);
        ev.expected_calls[c.key] += extra;
        ev.injected_calls[c.key] += n;
        for (std::int64_t i = 0; i < n; ++i) {
          const auto& caller = c.key == spec.cell ? eyewitnesses[rng.below(eyewitnesses.size())]
                                                  : c.residents[rng.below(c.residents.size())];
          place(t, caller, random_callee(caller), c.towers[rng.below(c.towers.size())], CallKind::voice);
        }
      }
    }
    for (; next_planned != planned.end() && next_planned->bin == t; ++next_planned) {
      place(t, *next_planned->caller, *next_planned->callee, *next_planned->tower, CallKind::voice);
    }
    const auto batch = std::span(out.records).subspan(batch_start);
    order.resize(batch.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return batch[a].timestamp < batch[b].timestamp;
    });
    scratch.clear();
    for (std::size_t i : order) scratch.push_back(std::move(batch[i]));
    std::move(scratch.begin(), scratch.end(), batch.begin());
  }
  return out;
}

}  // namespace cdr
