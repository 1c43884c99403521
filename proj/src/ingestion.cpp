#include "cdr/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include "cdr/error.hpp"
#include "cdr/parallel.hpp"

namespace cdr {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool read_header(std::istream& in, std::string_view expected, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t != expected) {
      throw ParseError("line " + std::to_string(line_no) + ": expected header '" +
                       std::string(expected) + "'");
    }
    return true;
  }
  return false;
}

double parse_double(std::string_view s, const std::string& what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError("invalid " + what + " '" + std::string(s) + "'");
  }
  return value;
}

CallRecord parse_record_line(std::string_view line) {
  const auto fields = split(line, ',');
  if (fields.size() != 5) {
    throw ParseError("expected 5 fields, found " + std::to_string(fields.size()));
  }
  CallRecord r;
  r.timestamp = parse_timestamp(trim(fields[0]));
  r.caller_id = std::string(trim(fields[1]));
  r.callee_id = std::string(trim(fields[2]));
  r.tower_id = std::string(trim(fields[3]));
  const auto kind = trim(fields[4]);
  if (kind == "voice") {
    r.kind = CallKind::voice;
  } else if (kind == "text") {
    r.kind = CallKind::text;
  } else {
    throw ParseError("unknown kind '" + std::string(kind) + "'");
  }
  if (r.caller_id.empty() || r.callee_id.empty() || r.tower_id.empty()) {
    throw ParseError("empty identifier");
  }
  if (r.caller_id == r.callee_id) throw ParseError("caller and callee are the same user");
  return r;
}

}  // namespace

std::string_view to_string(CallKind kind) { return kind == CallKind::voice ? "voice" : "text"; }

ParsedRecords parse_records(std::istream& in, bool strict) {
  ParsedRecords out;
  std::size_t line_no = 0;
  if (!read_header(in, kRecordsHeader, line_no)) return out;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    try {
      out.records.push_back(parse_record_line(t));
    } catch (const ParseError& e) {
      if (strict) throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
      out.issues.push_back({line_no, e.what()});
    }
  }
  return out;
}

TowerMap parse_towers(std::istream& in) {
  TowerMap towers;
  std::size_t line_no = 0;
  if (!read_header(in, kTowersHeader, line_no)) return towers;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto fields = split(t, ',');
    try {
      if (fields.size() != 3) {
        throw ParseError("expected 3 fields, found " + std::to_string(fields.size()));
      }
      const std::string id(trim(fields[0]));
      const Point p{parse_double(trim(fields[1]), "x_km"), parse_double(trim(fields[2]), "y_km")};
      if (id.empty()) throw ParseError("empty tower id");
      if (!towers.emplace(id, p).second) throw ParseError("duplicate tower id '" + id + "'");
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return towers;
}

void write_records(std::ostream& out, std::span<const CallRecord> records, minutes utc_offset) {
  out << kRecordsHeader << '\n';
  for (const auto& r : records) {
    out << format_timestamp(r.timestamp, utc_offset) << ',' << r.caller_id << ',' << r.callee_id
        << ',' << r.tower_id << ',' << to_string(r.kind) << '\n';
  }
}

void write_towers(std::ostream& out, const TowerMap& towers) {
  out << kTowersHeader << '\n';
  char buf[64];
  for (const auto& [id, p] : towers) {
    out << id;
    for (double v : {p.x, p.y}) {
      auto res = std::to_chars(buf, buf + sizeof buf, v);
      out << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
}

const LocationSeries* LocationSeriesSet::find(CellKey key) const {
  auto it = cells.find(key);
  return it == cells.end() ? nullptr : &it->second;
}

LocationSeriesSet build_series(std::span<const CallRecord> records, const TowerMap& towers,
                               const TimeGrid& grid, double cell_size, int jobs) {
  if (!(cell_size > 0.0)) throw ConfigError("cell_size must be positive");
  LocationSeriesSet set{grid, cell_size, {}};
  const auto n_bins = static_cast<std::size_t>(grid.total_bins());

  std::vector<CellKey> keys;
  std::unordered_map<std::string_view, std::size_t> tower_slot;
  {
    std::map<CellKey, std::size_t> slot_of;
    for (const auto& [id, p] : towers) {
      const GridCell cell = GridCell::containing(p, cell_size);
      auto [it, inserted] = slot_of.emplace(cell.key, keys.size());
      if (inserted) keys.push_back(cell.key);
      tower_slot.emplace(id, it->second);
    }
  }

  std::set<std::string> missing;
  for (const auto& r : records) {
    if (!tower_slot.contains(r.tower_id)) missing.insert(r.tower_id);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw DataError("records reference unknown towers: " + list);
  }

  const std::size_t shards = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1,
                                                     std::max<std::size_t>(records.size(), 1));
  std::vector<std::vector<std::uint32_t>> partial(shards);
  parallel_for(shards, jobs, [&](std::size_t s) {
    auto& counts = partial[s];
    counts.assign(keys.size() * n_bins, 0);
    const std::size_t begin = records.size() * s / shards;
    const std::size_t end = records.size() * (s + 1) / shards;
    for (std::size_t i = begin; i < end; ++i) {
      const auto& r = records[i];
      const std::size_t slot = tower_slot.find(r.tower_id)->second;
      ++counts[slot * n_bins + static_cast<std::size_t>(grid.bin_index(r.timestamp))];
    }
  });

  for (std::size_t slot = 0; slot < keys.size(); ++slot) {
    LocationSeries series{GridCell{keys[slot], cell_size}, std::vector<std::uint32_t>(n_bins, 0)};
    for (const auto& counts : partial) {
      for (std::size_t t = 0; t < n_bins; ++t) series.volume[t] += counts[slot * n_bins + t];
    }
    set.cells.emplace(keys[slot], std::move(series));
  }
  return set;
}

LocationSeriesSet filter_active(const LocationSeriesSet& set, double min_rate) {
  LocationSeriesSet out{set.grid, set.cell_size, {}};
  const double span = set.grid.span_minutes();
  for (const auto& [key, series] : set.cells) {
    if (static_cast<double>(series.total()) / span >= min_rate) out.cells.emplace(key, series);
  }
  return out;
}

}  // namespace cdr
