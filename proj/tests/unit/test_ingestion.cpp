#include <gtest/gtest.h>

#include <map>
#include <random>
#include <sstream>

#include "cdr/error.hpp"
#include "cdr/ingestion.hpp"

using namespace cdr;
using namespace std::chrono;

namespace {
const Timestamp kMonday = sys_days{year{2024} / 1 / 1};

CallRecord call(Timestamp t, std::string from, std::string to, std::string tower) {
  return {t, std::move(from), std::move(to), std::move(tower), CallKind::voice};
}
}  // namespace

TEST(ParseRecords, HeaderOnly) {
  std::istringstream in("timestamp,caller_id,callee_id,tower_id,kind\n");
  auto p = parse_records(in);
  EXPECT_TRUE(p.records.empty());
  EXPECT_TRUE(p.issues.empty());
}

TEST(ParseRecords, OneLine) {
  std::istringstream in("timestamp,caller_id,callee_id,tower_id,kind\n2024-01-01T00:05:00Z,a,b,t1,text\n");
  auto p = parse_records(in);
  ASSERT_EQ(p.records.size(), 1u);
  const auto& r = p.records[0];
  EXPECT_EQ(r.timestamp, kMonday + minutes{5});
  EXPECT_EQ(r.caller_id, "a");
  EXPECT_EQ(r.callee_id, "b");
  EXPECT_EQ(r.tower_id, "t1");
  EXPECT_EQ(r.kind, CallKind::text);
}

TEST(ParseRecords, LenientKeepsGoingStrictStops) {
  const std::string text =
      "timestamp,caller_id,callee_id,tower_id,kind\n"
      "2024-01-01T00:05:00Z,a,b,t1\n"
      "2024-01-01T00:06:00Z,a,b,t1,voice\n";
  std::istringstream lenient(text);
  auto p = parse_records(lenient);
  ASSERT_EQ(p.issues.size(), 1u);
  EXPECT_EQ(p.issues[0].line, 2u);
  EXPECT_EQ(p.records.size(), 1u);

  std::istringstream strict(text);
  try {
    parse_records(strict, true);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(ParseRecords, RejectsBadFields) {
  std::istringstream in(
      "timestamp,caller_id,callee_id,tower_id,kind\n"
      "yesterday,a,b,t1,voice\n"
      "2024-01-01T00:00:00Z,a,a,t1,voice\n"
      "2024-01-01T00:00:00Z,a,b,t1,fax\n");
  auto p = parse_records(in);
  EXPECT_EQ(p.issues.size(), 3u);
  EXPECT_TRUE(p.records.empty());
}

TEST(ParseRecords, RoundTrip) {
  std::vector<CallRecord> rs{call(kMonday, "x", "y", "t"), call(kMonday + hours{30}, "y", "z", "u")};
  rs[1].kind = CallKind::text;
  std::stringstream s;
  write_records(s, rs, minutes{-300});
  auto p = parse_records(s, true);
  EXPECT_EQ(p.records, rs);
}

TEST(ParseTowers, RoundTripAndErrors) {
  TowerMap towers{{"a", {0.25, 1.5}}, {"b", {-3.0, 1e-3}}};
  std::stringstream s;
  write_towers(s, towers);
  EXPECT_EQ(parse_towers(s), towers);

  std::istringstream dup("tower_id,x_km,y_km\na,0,0\na,1,1\n");
  EXPECT_THROW(parse_towers(dup), ParseError);
  std::istringstream bad("tower_id,x_km,y_km\na,zero,0\n");
  EXPECT_THROW(parse_towers(bad), ParseError);
}

TEST(BuildSeries, TowersInOneCellAreMerged) {
  TowerMap towers{{"t1", {0.1, 0.1}}, {"t2", {0.9, 0.8}}};
  TimeGrid grid(kMonday, 1);
  std::vector<CallRecord> rs;
  for (int i = 0; i < 3; ++i) {
    rs.push_back(call(kMonday + minutes{70} + seconds{i}, "a", "b", "t1"));
    rs.push_back(call(kMonday + minutes{75} + seconds{i}, "c", "d", "t2"));
  }
  auto set = build_series(rs, towers, grid, 1.0);
  ASSERT_EQ(set.cells.size(), 1u);
  EXPECT_EQ(set.cells.begin()->second.volume[7], 6u);
  EXPECT_EQ(set.cells.begin()->second.total(), 6u);
}

TEST(BuildSeries, NoRecordsGivesZeroSeries) {
  TowerMap towers{{"t1", {0.1, 0.1}}, {"t2", {5.5, 0.8}}};
  TimeGrid grid(kMonday, 2);
  auto set = build_series({}, towers, grid, 1.0);
  ASSERT_EQ(set.cells.size(), 2u);
  for (const auto& [key, s] : set.cells) {
    EXPECT_EQ(s.volume.size(), 2016u);
    EXPECT_EQ(s.total(), 0u);
  }
}

TEST(BuildSeries, MatchesGroupBy) {
  std::mt19937 rng(7);
  TowerMap towers;
  for (int i = 0; i < 30; ++i) {
    towers["t" + std::to_string(i)] = {std::uniform_real_distribution<double>(0, 4)(rng),
                                       std::uniform_real_distribution<double>(0, 3)(rng)};
  }
  TimeGrid grid(kMonday, 2);
  std::vector<CallRecord> rs;
  std::map<std::pair<std::pair<int, int>, int>, unsigned> oracle;
  for (int i = 0; i < 10000; ++i) {
    const int tower = std::uniform_int_distribution<int>(0, 29)(rng);
    const auto offset = seconds{std::uniform_int_distribution<long>(0, 2 * 7 * 86400 - 1)(rng)};
    const std::string id = "t" + std::to_string(tower);
    rs.push_back(call(kMonday + offset, "a", "b", id));
    const Point p = towers[id];
    oracle[{{int(std::floor(p.x)), int(std::floor(p.y))}, int(offset.count() / 600)}]++;
  }
  for (int jobs : {1, 3}) {
    auto set = build_series(rs, towers, grid, 1.0, jobs);
    std::size_t nonzero = 0;
    for (const auto& [key, s] : set.cells) {
      for (int t = 0; t < grid.total_bins(); ++t) {
        if (s.volume[t] == 0) continue;
        ++nonzero;
        EXPECT_EQ(s.volume[t], (oracle[{{key.ix, key.iy}, t}]));
      }
    }
    EXPECT_EQ(nonzero, oracle.size());
  }
}

TEST(BuildSeries, UnknownTowersListed) {
  TowerMap towers{{"t1", {0, 0}}};
  TimeGrid grid(kMonday, 1);
  std::vector<CallRecord> rs{call(kMonday, "a", "b", "zz"), call(kMonday, "a", "b", "qq")};
  try {
    build_series(rs, towers, grid, 1.0);
    FAIL();
  } catch (const DataError& e) {
    const std::string m = e.what();
    EXPECT_NE(m.find("zz"), std::string::npos);
    EXPECT_NE(m.find("qq"), std::string::npos);
  }
}

TEST(BuildSeries, RecordOutsideSpanIsRangeError) {
  TowerMap towers{{"t1", {0, 0}}};
  TimeGrid grid(kMonday, 1);
  std::vector<CallRecord> rs{call(kMonday + kWeek + hours{1}, "a", "b", "t1")};
  EXPECT_THROW(build_series(rs, towers, grid, 1.0), RangeError);
}

TEST(FilterActive, RateThreshold) {
  TimeGrid grid(kMonday, 26);
  LocationSeriesSet set{grid, 1.0, {}};
  LocationSeries exact{GridCell{{0, 0}, 1.0}, std::vector<std::uint32_t>(grid.total_bins(), 10)};
  LocationSeries zero{GridCell{{1, 0}, 1.0}, std::vector<std::uint32_t>(grid.total_bins(), 0)};
  LocationSeries thin{GridCell{{2, 0}, 1.0}, std::vector<std::uint32_t>(grid.total_bins(), 0)};
  // 250000 calls over 26 weeks: about 0.954 per minute.
  for (int i = 0; i < 250000; ++i) thin.volume[static_cast<std::size_t>(i % grid.total_bins())]++;
  set.cells[{0, 0}] = exact;
  set.cells[{1, 0}] = zero;
  set.cells[{2, 0}] = thin;
  auto kept = filter_active(set, 1.0);
  ASSERT_EQ(kept.cells.size(), 1u);
  EXPECT_TRUE(kept.find({0, 0}));
  EXPECT_EQ(filter_active(set, 1e-9).cells.size(), 2u);
  EXPECT_EQ(filter_active(set, 0.0).cells.size(), 3u);
}
