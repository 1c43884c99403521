#include <gtest/gtest.h>

#include <random>

#include "cdr/error.hpp"
#include "cdr/variance_detector.hpp"
#include "oracles.hpp"

using namespace cdr;

namespace {
std::vector<double> noise(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> d(50, 7);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}
}  // namespace

TEST(WeeklyProfile, PeriodicSeriesHasZeroSpread) {
  std::vector<double> v;
  for (int w = 0; w < 3; ++w)
    for (int p = 0; p < 5; ++p) v.push_back(p * 2.0 + 1);
  auto prof = weekly_profile(v, 5);
  for (int p = 0; p < 5; ++p) {
    EXPECT_DOUBLE_EQ(prof.mean[p], p * 2.0 + 1);
    EXPECT_DOUBLE_EQ(prof.std[p], 0.0);
  }
}

TEST(WeeklyProfile, TwoWeeksHandArithmetic) {
  std::vector<double> v{4, 0, 8, 0};
  auto prof = weekly_profile(v, 2);
  EXPECT_DOUBLE_EQ(prof.mean[0], 6.0);
  EXPECT_DOUBLE_EQ(prof.std[0], 2.0);
  EXPECT_DOUBLE_EQ(weekly_profile(v, 2, StdMode::sample).std[0], std::sqrt(8.0));
}

TEST(WeeklyProfile, Errors) {
  std::vector<double> v(10, 1.0);
  EXPECT_THROW(weekly_profile(v, 10), ConfigError);  // one week
  EXPECT_THROW(weekly_profile(v, 4), ConfigError);   // partial week
}

TEST(WeeklyProfile, MatchesReshape) {
  const int per_week = 48;
  auto v = noise(per_week * 6, 3);
  auto prof = weekly_profile(v, per_week);
  const auto m = oracle::weeks_matrix(v, per_week);
  for (int c = 0; c < per_week; ++c) {
    const double mean = m.col(c).mean();
    const double sd = std::sqrt((m.col(c).array() - mean).square().mean());
    EXPECT_NEAR(prof.mean[c], mean, 1e-12);
    EXPECT_NEAR(prof.std[c], sd, 1e-12);
  }
}

TEST(ZSeries, SelfInclusiveSpikeExample) {
  // +10 at one bin, W = 4: (10 - 2.5) / (10 * sqrt(3) / 4).
  std::vector<double> v(4 * 6, 3.0);
  v[6 * 2 + 1] += 10;
  auto z = z_series(v, weekly_profile(v, 6));
  EXPECT_NEAR(z.z[13], std::sqrt(3.0), 1e-12);
  EXPECT_FALSE(z.defined(0));
}

TEST(ZSeries, ValueAtMeanIsZero) {
  std::vector<double> v{1, 5, 3, 5, 2, 5};  // position 0 = {1,3,2}: mean 2
  auto z = z_series(v, weekly_profile(v, 2));
  EXPECT_DOUBLE_EQ(z.z[4], 0.0);
}

TEST(ZSeries, ConstantSeriesUndefined) {
  std::vector<double> v(40, 7.0);
  for (auto mode : {ProfileMode::self_inclusive, ProfileMode::leave_one_out}) {
    auto z = compute_z(v, 10, {2.5, StdMode::population, mode});
    for (std::size_t t = 0; t < z.size(); ++t) EXPECT_FALSE(z.defined(t));
  }
}

TEST(ZSeries, MatchesReshapeOracle) {
  for (int w : {2, 4, 8}) {
    auto v = noise(24 * w, 10 + w);
    auto got = z_series(v, weekly_profile(v, 24));
    auto want = oracle::z_self_inclusive(v, 24);
    for (std::size_t t = 0; t < v.size(); ++t) EXPECT_NEAR(got.z[t], want[t], 1e-9);
    if (w < 3) continue;
    auto loo = z_series_leave_one_out(v, 24);
    auto loo_want = oracle::z_leave_one_out(v, 24);
    for (std::size_t t = 0; t < v.size(); ++t) EXPECT_NEAR(loo.z[t], loo_want[t], 1e-9);
  }
}

TEST(ZSeries, AffineInvariant) {
  auto v = noise(20 * 5, 99);
  std::vector<double> u(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) u[i] = 3.5 * v[i] - 40;
  for (auto mode : {ProfileMode::self_inclusive, ProfileMode::leave_one_out}) {
    auto a = compute_z(v, 20, {2.5, StdMode::population, mode});
    auto b = compute_z(u, 20, {2.5, StdMode::population, mode});
    for (std::size_t t = 0; t < v.size(); ++t) EXPECT_NEAR(a.z[t], b.z[t], 1e-9);
  }
}

TEST(ZSeries, LeaveOneOutIsUnbounded) {
  // Self-inclusion caps |z| at sqrt(W-1); excluding the bin's own week does not.
  std::vector<double> v = noise(8 * 10, 5);
  v[7 * 10 + 3] += 1000;
  auto self = compute_z(v, 10, {2.5, StdMode::population, ProfileMode::self_inclusive});
  auto loo = compute_z(v, 10, {2.5, StdMode::population, ProfileMode::leave_one_out});
  EXPECT_LE(self.z[73], std::sqrt(7.0) + 1e-12);
  EXPECT_GT(loo.z[73], 50);
}

TEST(ZSeries, MonotoneInOwnValue) {
  auto v = noise(10 * 4, 17);
  double prev = -1e300;
  for (double bump : {0.0, 1.0, 5.0, 20.0}) {
    auto u = v;
    u[25] += bump;
    const double z = compute_z(u, 10, {}).z[25];
    EXPECT_GT(z, prev);
    prev = z;
  }
}

TEST(VarianceRuns, Examples) {
  auto runs = flag_variance_runs({{0, 3, 3, 0, 0}}, 2.5);
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_EQ(runs[0].t_start, 1);
  EXPECT_EQ(runs[0].t_stop, 2);
  EXPECT_EQ(runs[0].flagged_variance, (std::vector<int>{1, 2}));
  EXPECT_TRUE(flag_variance_runs({{0, 3, 0, 3, 0}}, 2.5).empty());
  EXPECT_TRUE(flag_variance_runs({{2.5, 2.5, 2.5}}, 2.5).empty());  // strict
}

TEST(VarianceRuns, UndefinedBinsBreakRuns) {
  auto runs = flag_variance_runs({{3, 3, kUndefinedZ, 3, 3}}, 2.5);
  ASSERT_EQ(runs.size(), 2u);
  EXPECT_EQ(runs[1].t_start, 3);
}

TEST(VarianceRuns, CrossesWeekBoundaryAndMatchesEnumeration) {
  std::mt19937 rng(1);
  std::vector<double> z(1008 * 2, 0.0);
  for (int t = 1004; t < 1012; ++t) z[t] = 3.0;
  auto runs = flag_variance_runs({z}, 2.5);
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_EQ(runs[0].t_start, 1004);
  EXPECT_EQ(runs[0].length(), 8);

  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> r(200);
    for (auto& x : r) x = std::uniform_real_distribution<double>(0, 4)(rng);
    std::vector<std::pair<int, int>> want;
    for (int t = 0; t < 200;) {
      if (r[t] <= 2.5) {
        ++t;
        continue;
      }
      int s = t;
      while (t < 200 && r[t] > 2.5) ++t;
      if (t - s > 1) want.emplace_back(s, t - 1);
    }
    auto got = flag_variance_runs({r}, 2.5);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].t_start, want[i].first);
      EXPECT_EQ(got[i].t_stop, want[i].second);
    }
  }
}
