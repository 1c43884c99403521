#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

namespace cdr {

using Timestamp = std::chrono::sys_seconds;
using std::chrono::minutes;
using std::chrono::seconds;

inline constexpr seconds kWeek{7 * 24 * 3600};

/// Parses an ISO-8601 timestamp with a fixed offset, e.g.
/// `2024-03-04T18:20:00+01:00` or `2024-03-04T18:20:00Z`. Fractional seconds
/// are truncated. Throws ParseError.
Timestamp parse_timestamp(std::string_view text);

/// Formats `t` as local time at `utc_offset`, always with an explicit offset.
std::string format_timestamp(Timestamp t, minutes utc_offset = minutes{0});

/// Maps instants onto half-open bins of fixed width covering a whole number of
/// weeks. Bin 0 opens at local midnight of the configured first weekday.
class TimeGrid {
 public:
  /// `week_start` uses the ISO numbering (1 = Monday ... 7 = Sunday).
  TimeGrid(Timestamp origin, int weeks, seconds bin_width = minutes{10},
           minutes utc_offset = minutes{0}, unsigned week_start = 1);

  /// Smallest whole-week grid that contains [first, last].
  static TimeGrid covering(Timestamp first, Timestamp last, seconds bin_width = minutes{10},
                           minutes utc_offset = minutes{0}, unsigned week_start = 1);

  Timestamp origin() const { return origin_; }
  int weeks() const { return weeks_; }
  seconds bin_width() const { return bin_width_; }
  minutes utc_offset() const { return utc_offset_; }
  unsigned week_start() const { return week_start_; }
  int bins_per_week() const { return bins_per_week_; }
  int total_bins() const { return bins_per_week_ * weeks_; }
  double bin_minutes() const { return static_cast<double>(bin_width_.count()) / 60.0; }
  double span_minutes() const { return bin_minutes() * total_bins(); }

  bool contains(Timestamp t) const;

  /// floor((t - origin) / bin_width). Throws RangeError outside the span.
  int bin_index(Timestamp t) const;

  /// [start, end) of `bin`.
  std::pair<Timestamp, Timestamp> bin_interval(int bin) const;

  /// bin mod bins_per_week. Throws RangeError outside [0, total_bins).
  int week_position(int bin) const;
  int week_of(int bin) const;

  /// Local wall-clock hour of the start of `bin`, in [0, 24).
  double hour_of_day(int bin) const;
  /// Days since the start of the week, 0 = the configured first weekday.
  int day_of_week(int bin) const;

  bool operator==(const TimeGrid&) const = default;

 private:
  void check_bin(int bin) const;

  Timestamp origin_;
  int weeks_;
  seconds bin_width_;
  minutes utc_offset_;
  unsigned week_start_;
  int bins_per_week_;
};

}  // namespace cdr
