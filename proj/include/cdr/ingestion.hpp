#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cdr/time_grid.hpp"
#include "cdr/types.hpp"

namespace cdr {

/// tower_id -> projected position (km).
using TowerMap = std::map<std::string, Point>;

inline constexpr const char* kRecordsHeader = "timestamp,caller_id,callee_id,tower_id,kind";
inline constexpr const char* kTowersHeader = "tower_id,x_km,y_km";

struct LineIssue {
  std::size_t line = 0;
  std::string message;
};

struct ParsedRecords {
  std::vector<CallRecord> records;
  std::vector<LineIssue> issues;
};

/// Reads the records CSV. Malformed lines are collected in `issues` with their
/// 1-based line number and skipped, unless `strict` is set, in which case the
/// first one throws ParseError.
ParsedRecords parse_records(std::istream& in, bool strict = false);

/// Reads the towers CSV. Any malformed line or duplicate id throws ParseError.
TowerMap parse_towers(std::istream& in);

void write_records(std::ostream& out, std::span<const CallRecord> records,
                   minutes utc_offset = minutes{0});
void write_towers(std::ostream& out, const TowerMap& towers);

std::string_view to_string(CallKind kind);

/// Per-cell series for every cell holding at least one tower.
struct LocationSeriesSet {
  TimeGrid grid;
  double cell_size = 1.0;
  std::map<CellKey, LocationSeries> cells;

  const LocationSeries* find(CellKey key) const;
};

/// Counts each record once, at the cell of its tower. Unknown tower ids throw
/// DataError naming all of them; records outside the grid throw RangeError.
/// Record shards are counted on up to `jobs` threads and summed, so the result
/// does not depend on `jobs`.
LocationSeriesSet build_series(std::span<const CallRecord> records, const TowerMap& towers,
                               const TimeGrid& grid, double cell_size, int jobs = 1);

/// Keeps cells whose mean rate over the whole span is at least `min_rate`
/// events per minute.
LocationSeriesSet filter_active(const LocationSeriesSet& set, double min_rate);

}  // namespace cdr
