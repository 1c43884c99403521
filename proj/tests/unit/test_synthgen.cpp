#include <gtest/gtest.h>

#include <sstream>

#include "cdr/characterization.hpp"
#include "cdr/error.hpp"
#include "cdr/ingestion.hpp"
#include "cdr/synthgen.hpp"

using namespace cdr;

namespace {
SynthConfig small(std::uint64_t seed) {
  SynthConfig c;
  c.seed = seed;
  c.weeks = 2;
  c.nx = 2;
  c.ny = 1;
  c.base_rate = 20;
  c.users_per_cell = 50;
  return c;
}
}  // namespace

TEST(Rng, DistributionMoments) {
  Rng rng(42);
  for (double mean : {0.3, 4.0, 25.0, 400.0}) {
    double s = 0, ss = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
      const double x = static_cast<double>(rng.poisson(mean));
      s += x;
      ss += x * x;
    }
    const double m = s / n;
    const double var = ss / n - m * m;
    EXPECT_NEAR(m, mean, 5 * std::sqrt(mean / n)) << mean;
    EXPECT_NEAR(var / mean, 1.0, 0.05) << mean;
  }
  EXPECT_EQ(rng.poisson(0.0), 0);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(rng.below(7), 7u);
  }
}

TEST(Rng, FixedStream) {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.poisson(30), b.poisson(30));
}

TEST(PulseShapes, PeakAtOne) {
  for (auto s : {PulseShape::instant_decay, PulseShape::ramp, PulseShape::plateau}) {
    double peak = 0;
    for (int k = 0; k < 10; ++k) {
      const double w = pulse_weight(s, k, 10);
      EXPECT_GE(w, 0.0);
      peak = std::max(peak, w);
    }
    EXPECT_DOUBLE_EQ(peak, 1.0);
    EXPECT_EQ(parse_pulse_shape(to_string(s)), s);
  }
  EXPECT_THROW(parse_pulse_shape("square"), ConfigError);
}

TEST(Synth, SameSeedSameBytes) {
  auto c = small(3);
  c.events.push_back({{0, 0}, 500, 10});
  auto write = [](const SynthDataset& d) {
    std::ostringstream s;
    write_records(s, d.records);
    write_towers(s, d.towers);
    return s.str();
  };
  const std::string a = write(generate(c));
  EXPECT_EQ(a, write(generate(c)));
  c.seed = 4;
  EXPECT_NE(a, write(generate(c)));
}

TEST(Synth, RecordsOrderedAndInsideGrid) {
  auto d = generate(small(1));
  const TimeGrid g = small(1).grid();
  ASSERT_FALSE(d.records.empty());
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    EXPECT_TRUE(g.contains(d.records[i].timestamp));
    if (i) ASSERT_LE(d.records[i - 1].timestamp, d.records[i].timestamp);
    ASSERT_NE(d.records[i].caller_id, d.records[i].callee_id);
  }
}

TEST(Synth, ManifestWindowMatchesInjection) {
  auto c = small(2);
  c.events.push_back({{1, 0}, 700, 10, 5.0});
  auto d = generate(c);
  ASSERT_EQ(d.truth.events.size(), 1u);
  const auto& e = d.truth.events[0];
  EXPECT_EQ(e.t_start, 700);
  EXPECT_EQ(e.t_stop, 709);
  EXPECT_EQ(e.epicenter, (Point{1.5, 0.5}));
  EXPECT_GT(e.injected_calls.at({1, 0}), 0);
  EXPECT_EQ(e.cascade.size(), 4u);
}

TEST(Synth, InjectedVolumeNearExpectation) {
  auto c = small(9);
  c.events.push_back({{0, 0}, 300, 10, 5.0, PulseShape::plateau, 1.0});
  auto d = generate(c);
  const auto& e = d.truth.events[0];
  for (const auto& [cell, n] : e.injected_calls) {
    const double want = e.expected_calls.at(cell);
    EXPECT_NEAR(static_cast<double>(n), want, 5 * std::sqrt(want) + 1);
  }
  // falloff: epicentre gets more than its neighbour
  EXPECT_GT(e.expected_calls.at({0, 0}), e.expected_calls.at({1, 0}));
}

TEST(Synth, PlantedCascadeIsRecovered) {
  auto c = small(4);
  InjectionSpec spec{{0, 0}, 400, 10};
  spec.cascade_delay = 1;
  c.events.push_back(spec);
  auto d = generate(c);
  const auto& e = d.truth.events[0];
  RecordIndex index(d.records, d.towers, d.truth.grid, c.cell_size);
  auto layers = extract_populations(index, {0, 0}, {e.t_start, e.t_stop}, {});
  ASSERT_EQ(layers.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    for (const auto& name : e.cascade[i]) {
      EXPECT_TRUE(std::binary_search(layers[i].members.begin(), layers[i].members.end(), name))
          << "layer " << i << " lacks " << name;
    }
  }
}

TEST(Synth, ValidationErrors) {
  auto c = small(1);
  c.events.push_back({{5, 0}, 10, 10});
  EXPECT_THROW(generate(c), ConfigError);
  c.events = {{{0, 0}, c.grid().total_bins() - 5, 10}};
  EXPECT_THROW(generate(c), ConfigError);
  c = small(1);
  c.weeks = 1;
  EXPECT_THROW(generate(c), ConfigError);
}
