#include <gtest/gtest.h>

#include <random>

#include "cdr/characterization.hpp"
#include "oracles.hpp"

using namespace cdr;
using namespace std::chrono;

namespace {
const Timestamp kMonday = sys_days{year{2024} / 1 / 1};

std::map<CellKey, double> exp_field(double r_c, int half, double amp = 1000.0) {
  std::map<CellKey, double> m;
  for (int ix = -half; ix <= half; ++ix)
    for (int iy = -half; iy <= half; ++iy)
      m[{ix, iy}] = amp * std::exp(-std::hypot(ix, iy) / r_c);
  return m;
}
}  // namespace

TEST(Midpoint, Examples) {
  EXPECT_DOUBLE_EQ(*midpoint_fraction(std::vector<double>{1, 1, 1, 1}), 0.5);
  std::vector<double> impulse(10, 0.0);
  impulse[0] = 7;
  EXPECT_DOUBLE_EQ(*midpoint_fraction(impulse), 0.05);
  EXPECT_NEAR(*midpoint_fraction(std::vector<double>{1, 2, 3, 4, 3, 2, 1}), 0.5, 1e-12);
  EXPECT_FALSE(midpoint_fraction(std::vector<double>{0, 0, 0}));
  EXPECT_FALSE(midpoint_fraction(std::vector<double>{2, -5, 1}));
  EXPECT_FALSE(midpoint_fraction(std::vector<double>{}));
}

TEST(Midpoint, ReversalAndRange) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = std::uniform_int_distribution<int>(5, 40)(rng);
    std::vector<double> x(n);
    for (auto& v : x) v = std::uniform_real_distribution<double>(0, 10)(rng);
    auto r = x;
    std::reverse(r.begin(), r.end());
    const double a = *midpoint_fraction(x);
    const double b = *midpoint_fraction(r);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
    EXPECT_LE(std::abs(a + b - 1.0), 2.0 / n);
  }
}

TEST(Baseline, WeeklyMeanAndPriorWeek) {
  const TimeGrid grid(kMonday, 3, minutes{10});
  LocationSeries s{GridCell{{0, 0}, 1.0}, std::vector<std::uint32_t>(grid.total_bins(), 0)};
  const int p = 100;
  s.volume[p] = 10;
  s.volume[p + 1008] = 20;
  s.volume[p + 2016] = 60;
  // window in week 2: mean of weeks 0 and 1 = 15, prior week = 20
  BinWindow w{p + 2016, p + 2016};
  EXPECT_DOUBLE_EQ(baseline_series(s, grid, w, BaselineMode::weekly_mean)[0], 15.0);
  EXPECT_DOUBLE_EQ(baseline_series(s, grid, w, BaselineMode::prior_week)[0], 20.0);
  EXPECT_DOUBLE_EQ(anomalous_volume(s, grid, w, BaselineMode::weekly_mean)[0], 45.0);
  // week 0 has no prior week; the following one stands in
  BinWindow w0{p, p};
  EXPECT_DOUBLE_EQ(baseline_series(s, grid, w0, BaselineMode::prior_week)[0], 20.0);
}

TEST(Decay, RecoversNoiselessExponential) {
  for (double r_c : {0.5, 1.0, 2.33, 5.0, 10.0}) {
    auto rings = ring_profile(exp_field(r_c, 20), 1.0, {0.5, 0.5}, 1.0, 20.0);
    auto fit = fit_decay(rings);
    ASSERT_TRUE(fit.r_c) << fit.reason;
    EXPECT_NEAR(*fit.r_c / r_c, 1.0, 0.1) << r_c;
  }
}

TEST(Decay, Degenerate) {
  std::map<CellKey, double> only_centre;
  for (int ix = -3; ix <= 3; ++ix)
    for (int iy = -3; iy <= 3; ++iy) only_centre[{ix, iy}] = (ix == 0 && iy == 0) ? 50.0 : -1.0;
  auto fit = fit_decay(ring_profile(only_centre, 1.0, {0.5, 0.5}, 1.0));
  EXPECT_FALSE(fit.r_c);
  EXPECT_FALSE(fit.reason.empty());

  std::map<CellKey, double> flat;
  for (int ix = -5; ix <= 5; ++ix)
    for (int iy = -5; iy <= 5; ++iy) flat[{ix, iy}] = 12.0;
  fit = fit_decay(ring_profile(flat, 1.0, {0.5, 0.5}, 1.0));
  EXPECT_FALSE(fit.r_c);
  EXPECT_NEAR(fit.slope, 0.0, 1e-9);
}

TEST(Decay, RingsRespectRadius) {
  auto rings = ring_profile(exp_field(2.0, 10), 1.0, {0.5, 0.5}, 1.0, 3.0);
  for (const auto& r : rings) EXPECT_LE(r.mean_distance, 3.0);
  int cells = 0;
  for (const auto& r : rings) cells += r.cells;
  int want = 0;
  for (int ix = -10; ix <= 10; ++ix)
    for (int iy = -10; iy <= 10; ++iy) want += std::hypot(ix, iy) <= 3.0;
  EXPECT_EQ(cells, want);
}

namespace {
struct Graph {
  TowerMap towers{{"in", {0.5, 0.5}}, {"out", {3.5, 3.5}}};
  TimeGrid grid{kMonday, 2};
  std::vector<CallRecord> records;
  std::vector<oracle::Edge> edges;
  void add(const std::string& a, const std::string& b, int bin, bool voice, bool at_cell) {
    records.push_back({kMonday + minutes{10 * bin} + seconds{1}, a, b, at_cell ? "in" : "out",
                       voice ? CallKind::voice : CallKind::text});
    edges.push_back({a, b, bin, voice, at_cell});
  }
};

std::vector<std::set<std::string>> as_sets(const std::vector<PopulationLayer>& layers) {
  std::vector<std::set<std::string>> out;
  for (const auto& l : layers) out.emplace_back(l.members.begin(), l.members.end());
  return out;
}
}  // namespace

TEST(Populations, ChainGraph) {
  Graph g;
  g.add("a", "b", 10, true, true);
  g.add("b", "c", 11, true, false);
  g.add("c", "d", 12, true, false);
  g.add("d", "e", 13, true, false);
  RecordIndex index(g.records, g.towers, g.grid, 1.0);
  auto layers = extract_populations(index, {0, 0}, {10, 20}, {});
  ASSERT_EQ(layers.size(), 4u);
  const char* want[] = {"a", "b", "c", "d"};
  for (int i = 0; i < 4; ++i) EXPECT_EQ(layers[i].members, std::vector<std::string>{want[i]});
  EXPECT_DOUBLE_EQ(layers[0].series[0], 1.0);
  EXPECT_DOUBLE_EQ(layers[3].series[3], 1.0);
}

TEST(Populations, EmptyWhenNoCallsAtCell) {
  Graph g;
  g.add("a", "b", 10, true, false);
  RecordIndex index(g.records, g.towers, g.grid, 1.0);
  EXPECT_TRUE(extract_populations(index, {0, 0}, {0, 30}, {}).empty());
}

TEST(Populations, TextsSeedButDoNotPropagateByDefault) {
  Graph g;
  g.add("a", "b", 10, false, true);
  g.add("a", "c", 11, true, false);
  RecordIndex index(g.records, g.towers, g.grid, 1.0);
  auto layers = extract_populations(index, {0, 0}, {10, 20}, {});
  EXPECT_EQ(layers[0].members, std::vector<std::string>{"a"});
  EXPECT_EQ(layers[1].members, std::vector<std::string>{"c"});
  auto with_texts = extract_populations(index, {0, 0}, {10, 20}, {3, true});
  EXPECT_EQ(with_texts[1].members, (std::vector<std::string>{"b", "c"}));
}

TEST(Populations, MatchBfsOracle) {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    Graph g;
    const int users = std::uniform_int_distribution<int>(3, 40)(rng);
    const int edges = std::uniform_int_distribution<int>(1, 300)(rng);
    std::uniform_int_distribution<int> pick(0, users - 1);
    for (int e = 0; e < edges; ++e) {
      int a = pick(rng), b = pick(rng);
      if (a == b) continue;
      g.add("u" + std::to_string(a), "u" + std::to_string(b), std::uniform_int_distribution<int>(0, 60)(rng),
            rng() % 4 != 0, rng() % 5 == 0);
    }
    RecordIndex index(g.records, g.towers, g.grid, 1.0);
    for (bool texts : {false, true}) {
      auto got = as_sets(extract_populations(index, {0, 0}, {15, 40}, {3, texts}));
      EXPECT_EQ(got, oracle::bfs_layers(g.edges, 15, 40, 3, texts));
    }
  }
}

TEST(SocialPropagation, Examples) {
  auto layer = [](std::vector<double> s) {
    PopulationLayer l;
    l.series = s;
    l.baseline_series.assign(s.size(), 0.0);
    return l;
  };
  std::vector<PopulationLayer> spikes{layer({4, 0, 0, 0}), layer({9, 0, 0, 0})};
  EXPECT_NEAR(*social_propagation_factor(spikes), 0.125, 1e-12);
  std::vector<PopulationLayer> flat{layer({1, 1, 1, 1}), layer({3, 3, 3, 3})};
  EXPECT_DOUBLE_EQ(*social_propagation_factor(flat), 0.5);
  // layer i peaks at bin 2i of a 10-bin window
  std::vector<PopulationLayer> cascade;
  double want = 0;
  for (int i = 0; i < 4; ++i) {
    std::vector<double> s(10, 0.0);
    s[2 * i] = 5;
    cascade.push_back(layer(s));
    want += (2 * i + 0.5) / 10.0 / 4;
  }
  EXPECT_NEAR(*social_propagation_factor(cascade), want, 1e-12);
  std::vector<PopulationLayer> none{layer({0, 0})};
  EXPECT_FALSE(social_propagation_factor(none));
}
