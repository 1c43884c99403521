#include "cdr/time_grid.hpp"

#include <charconv>
#include <cstdio>

#include "cdr/error.hpp"

namespace cdr {

namespace {

using namespace std::chrono;

int parse_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
  int value = 0;
  if (pos + len > text.size()) {
    throw ParseError("truncated timestamp '" + std::string(whole) + "'");
  }
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
  if (ec != std::errc{} || ptr != text.data() + pos + len) {
    throw ParseError("malformed timestamp '" + std::string(whole) + "'");
  }
  return value;
}

void expect(std::string_view text, std::size_t pos, char c, std::string_view whole) {
  if (pos >= text.size() || text[pos] != c) {
    throw ParseError("malformed timestamp '" + std::string(whole) + "'");
  }
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SS[.fff](Z|+HH:MM|-HH:MM)
  const int y = parse_int(text, 0, 4, text);
  expect(text, 4, '-', text);
  const int mo = parse_int(text, 5, 2, text);
  expect(text, 7, '-', text);
  const int d = parse_int(text, 8, 2, text);
  if (text.size() <= 10 || (text[10] != 'T' && text[10] != ' ')) {
    throw ParseError("malformed timestamp '" + std::string(text) + "'");
  }
  const int h = parse_int(text, 11, 2, text);
  expect(text, 13, ':', text);
  const int mi = parse_int(text, 14, 2, text);
  expect(text, 16, ':', text);
  const int s = parse_int(text, 17, 2, text);
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
  }
  if (pos >= text.size()) {
    throw ParseError("timestamp without UTC offset '" + std::string(text) + "'");
  }
  int offset_min = 0;
  if (text[pos] == 'Z') {
    ++pos;
  } else if (text[pos] == '+' || text[pos] == '-') {
    const int sign = text[pos] == '-' ? -1 : 1;
    const int oh = parse_int(text, pos + 1, 2, text);
    expect(text, pos + 3, ':', text);
    const int om = parse_int(text, pos + 4, 2, text);
    offset_min = sign * (oh * 60 + om);
    pos += 6;
  } else {
    throw ParseError("malformed UTC offset in '" + std::string(text) + "'");
  }
  if (pos != text.size()) {
    throw ParseError("trailing characters in timestamp '" + std::string(text) + "'");
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
    throw ParseError("invalid calendar value in '" + std::string(text) + "'");
  }
  return Timestamp{sys_days{ymd}} + hours{h} + minutes{mi} + seconds{s} - minutes{offset_min};
}

std::string format_timestamp(Timestamp t, minutes utc_offset) {
  const auto local = t + utc_offset;
  const auto day_start = floor<days>(local);
  const year_month_day ymd{day_start};
  const hh_mm_ss hms{local - day_start};
  const long off = utc_offset.count();
  const long off_abs = off < 0 ? -off : off;
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ld%c%02ld:%02ld",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<long>(hms.hours().count()),
                static_cast<long>(hms.minutes().count()), static_cast<long>(hms.seconds().count()),
                off < 0 ? '-' : '+', off_abs / 60, off_abs % 60);
  return buf;
}

TimeGrid::TimeGrid(Timestamp origin, int weeks, seconds bin_width, minutes utc_offset,
                   unsigned week_start)
    : origin_(origin),
      weeks_(weeks),
      bin_width_(bin_width),
      utc_offset_(utc_offset),
      week_start_(week_start),
      bins_per_week_(0) {
  if (weeks < 1) throw ConfigError("time grid needs at least one week");
  if (bin_width.count() <= 0 || kWeek.count() % bin_width.count() != 0) {
    throw ConfigError("bin width of " + std::to_string(bin_width.count()) +
                      " s does not evenly divide one week");
  }
  if (week_start < 1 || week_start > 7) throw ConfigError("week_start must be in 1..7");
  bins_per_week_ = static_cast<int>(kWeek.count() / bin_width.count());

  const auto local = origin + utc_offset;
  const auto day_start = floor<days>(local);
  if (local != day_start || weekday{day_start}.iso_encoding() != week_start) {
    throw ConfigError("grid origin " + format_timestamp(origin, utc_offset) +
                      " is not local midnight of the first day of the week");
  }
}

TimeGrid TimeGrid::covering(Timestamp first, Timestamp last, seconds bin_width,
                            minutes utc_offset, unsigned week_start) {
  const auto local_day = floor<days>(first + utc_offset);
  const unsigned dow = weekday{local_day}.iso_encoding();
  const auto back = days{(dow + 7 - week_start) % 7};
  const Timestamp origin = Timestamp{local_day - back} - utc_offset;
  const auto span = last - origin;
  const int weeks = static_cast<int>(span / kWeek) + 1;
  return TimeGrid(origin, weeks, bin_width, utc_offset, week_start);
}

bool TimeGrid::contains(Timestamp t) const {
  return t >= origin_ && t < origin_ + kWeek * weeks_;
}

int TimeGrid::bin_index(Timestamp t) const {
  if (!contains(t)) {
    throw RangeError("timestamp " + format_timestamp(t, utc_offset_) + " outside grid span [" +
                     format_timestamp(origin_, utc_offset_) + ", " +
                     format_timestamp(origin_ + kWeek * weeks_, utc_offset_) + ")");
  }
  return static_cast<int>((t - origin_) / bin_width_);
}

std::pair<Timestamp, Timestamp> TimeGrid::bin_interval(int bin) const {
  check_bin(bin);
  const Timestamp start = origin_ + bin_width_ * bin;
  return {start, start + bin_width_};
}

int TimeGrid::week_position(int bin) const {
  check_bin(bin);
  return bin % bins_per_week_;
}

int TimeGrid::week_of(int bin) const {
  check_bin(bin);
  return bin / bins_per_week_;
}

double TimeGrid::hour_of_day(int bin) const {
  check_bin(bin);
  // The origin is local midnight, so the offset within the day is local.
  const auto into_day = (bin_width_ * bin) % days{1};
  return static_cast<double>(into_day.count()) / 3600.0;
}

int TimeGrid::day_of_week(int bin) const {
  check_bin(bin);
  return static_cast<int>((bin_width_ * bin) % kWeek / days{1});
}

void TimeGrid::check_bin(int bin) const {
  if (bin < 0 || bin >= total_bins()) {
    throw RangeError("bin " + std::to_string(bin) + " outside [0, " +
                     std::to_string(total_bins()) + ")");
  }
}

}  // namespace cdr
