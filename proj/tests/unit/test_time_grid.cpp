#include <gtest/gtest.h>

#include "cdr/error.hpp"
#include "cdr/time_grid.hpp"
#include "cdr/types.hpp"

using namespace cdr;
using namespace std::chrono;

namespace {
const Timestamp kMonday = sys_days{year{2024} / 1 / 1};
}

TEST(TimeGrid, BinIndexBoundaries) {
  TimeGrid g(kMonday, 2);
  EXPECT_EQ(g.bin_index(kMonday), 0);
  EXPECT_EQ(g.bin_index(kMonday + minutes{10} - seconds{1}), 0);
  EXPECT_EQ(g.bin_index(kMonday + minutes{10}), 1);
  EXPECT_EQ(g.bin_index(kMonday + kWeek), 1008);
  EXPECT_EQ(g.bins_per_week(), 1008);
  EXPECT_EQ(g.total_bins(), 2016);
}

TEST(TimeGrid, OutOfSpanIsRangeError) {
  TimeGrid g(kMonday, 1);
  EXPECT_THROW(g.bin_index(kMonday - seconds{1}), RangeError);
  EXPECT_THROW(g.bin_index(kMonday + kWeek), RangeError);
  try {
    g.bin_index(kMonday + kWeek);
  } catch (const RangeError& e) {
    EXPECT_NE(std::string(e.what()).find("2024-01-08"), std::string::npos);
  }
}

TEST(TimeGrid, WeekPosition) {
  TimeGrid g(kMonday, 3);
  EXPECT_EQ(g.week_position(0), 0);
  EXPECT_EQ(g.week_position(1008), 0);
  EXPECT_EQ(g.week_position(2500), 484);
  EXPECT_EQ(g.week_of(2500), 2);
}

TEST(TimeGrid, IntervalInvertsIndex) {
  TimeGrid g(kMonday, 2, minutes{15});
  for (int b : {0, 1, 95, 671, 1343}) {
    auto [lo, hi] = g.bin_interval(b);
    EXPECT_EQ(hi - lo, minutes{15});
    EXPECT_EQ(g.bin_index(lo), b);
    EXPECT_EQ(g.bin_index(hi - seconds{1}), b);
  }
}

TEST(TimeGrid, RejectsBadConstruction) {
  EXPECT_THROW(TimeGrid(kMonday, 0), ConfigError);
  EXPECT_THROW(TimeGrid(kMonday, 1, minutes{11}), ConfigError);  // 11 does not divide a week
  EXPECT_THROW(TimeGrid(kMonday + hours{1}, 1), ConfigError);            // not midnight
  EXPECT_THROW(TimeGrid(kMonday + days{1}, 1), ConfigError);             // Tuesday
  EXPECT_NO_THROW(TimeGrid(kMonday + days{6}, 1, minutes{10}, minutes{0}, 7));  // Sunday start
}

TEST(TimeGrid, LocalOffsetShiftsOrigin) {
  // Local midnight Monday at UTC+2 is Sunday 22:00 UTC.
  const Timestamp origin = kMonday - hours{2};
  TimeGrid g(origin, 1, minutes{10}, minutes{120});
  EXPECT_DOUBLE_EQ(g.hour_of_day(0), 0.0);
  EXPECT_EQ(g.day_of_week(0), 0);
  EXPECT_DOUBLE_EQ(g.hour_of_day(6 * 19), 19.0);
}

TEST(TimeGrid, CoveringSpansRecords) {
  const Timestamp first = kMonday + days{3} + hours{5};
  const Timestamp last = kMonday + days{15};
  TimeGrid g = TimeGrid::covering(first, last);
  EXPECT_EQ(g.origin(), kMonday);
  EXPECT_EQ(g.weeks(), 3);
  EXPECT_TRUE(g.contains(last));
}

TEST(Timestamp, ParsesOffsetsAndFormatsBack) {
  EXPECT_EQ(parse_timestamp("2024-01-01T00:00:00Z"), kMonday);
  EXPECT_EQ(parse_timestamp("2024-01-01T02:00:00+02:00"), kMonday);
  EXPECT_EQ(parse_timestamp("2023-12-31T19:30:00-04:30"), kMonday);
  EXPECT_EQ(parse_timestamp("2024-01-01T00:00:00.75Z"), kMonday);
  EXPECT_EQ(format_timestamp(kMonday, minutes{60}), "2024-01-01T01:00:00+01:00");
  EXPECT_THROW(parse_timestamp("2024-01-01 00:00"), ParseError);
  EXPECT_THROW(parse_timestamp("2024-13-01T00:00:00Z"), ParseError);
}

TEST(GridCell, CentreAndMembership) {
  auto a = GridCell::containing({0.2, 0.9}, 1.0);
  auto b = GridCell::containing({0.99, 0.01}, 1.0);
  auto c = GridCell::containing({-0.5, 2.5}, 1.0);
  EXPECT_EQ(a, b);
  EXPECT_EQ(c.key.ix, -1);
  EXPECT_EQ(c.key.iy, 2);
  EXPECT_EQ(a.center(), (Point{0.5, 0.5}));
  EXPECT_EQ(GridCell::containing({3.1, 0}, 2.0).center(), (Point{3.0, 1.0}));
}
