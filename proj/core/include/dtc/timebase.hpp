#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dtc/error.hpp"

namespace dtc::timebase {

// UTC instant at second resolution. posix_seconds counts exactly 86400 s per
// UTC day, so it does not advance across an inserted leap second. The
// inserted second 23:59:60 shares the posix value of its host 23:59:59 and is
// distinguished by leap_flag; the pair (posix_seconds, leap_flag) is totally
// ordered with the inserted second sorting between 23:59:59 and the next
// midnight.
struct Instant {
  std::int64_t posix_seconds = 0;
  bool leap_flag = false;

  friend constexpr auto operator<=>(const Instant&, const Instant&) = default;
};

using Span = std::pair<Instant, Instant>;  // half-open [first, second)

// Non-negative whole minutes.
class DurationMin {
 public:
  constexpr DurationMin() = default;
  explicit DurationMin(std::int64_t minutes);

  constexpr std::int64_t minutes() const noexcept { return minutes_; }

  DurationMin& operator+=(DurationMin other) {
    minutes_ += other.minutes_;
    return *this;
  }
  friend DurationMin operator+(DurationMin a, DurationMin b) { return a += b; }
  friend constexpr auto operator<=>(const DurationMin&, const DurationMin&) = default;

 private:
  std::int64_t minutes_ = 0;
};

// ISO-8601 week label; weeks run Monday 00:00 to the next Monday 00:00 UTC.
struct WeekId {
  int iso_year = 0;
  int iso_week = 0;  // 1..52 or 1..53 depending on the year

  friend constexpr auto operator<=>(const WeekId&, const WeekId&) = default;

  std::string str() const;                       // "2024-W02"
  static WeekId parse(std::string_view text);    // inverse of str()
};

struct LeapEntry {
  std::int64_t day_start = 0;  // posix seconds at 00:00 UTC of the entry date
  int sign = 0;                // +1 second inserted at day end, -1 removed
};

// Announced leap-second adjustments, strictly ascending by date.
class LeapTable {
 public:
  LeapTable() = default;

  static LeapTable from_entries(std::vector<LeapEntry> entries);
  static LeapTable parse(std::string_view text);      // file body, see README
  static LeapTable load(const std::string& path);

  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<LeapEntry>& entries() const noexcept { return entries_; }

  // Sum of signs of entries whose day-end boundary is <= posix.
  std::int64_t cumulative_offset(std::int64_t posix) const;

  // Sign of the entry on the UTC day starting at day_start, if any.
  std::optional<int> sign_on_day(std::int64_t day_start) const;

  // Whether t falls inside the era the table can speak about: tables list
  // announced adjustments only, so instants more than ~18 months past the
  // last entry may be missing future announcements. Callers surface this as
  // a warning, not an error.
  bool covers(Instant t) const;

 private:
  std::vector<LeapEntry> entries_;
};

enum class LeapPolicy {
  IgnoreLeap,    // leap table disregarded entirely
  FoldLeap,      // inserted/removed seconds counted in physical durations
  StrictLiteral  // like FoldLeap, but refuses weeks whose Sunday has no 24:00
};

struct BoundaryUndefined : Error {
  WeekId week;
  explicit BoundaryUndefined(WeekId w);
};

struct NegativeSpan : Error {
  NegativeSpan() : Error("NegativeSpan", "span end precedes span start") {}
};

// ISO week containing t. An inserted 23:59:60 belongs to the day it extends.
// StrictLiteral raises BoundaryUndefined when the containing week's Sunday
// carries a negative leap entry (its 24:00:00 moment does not exist).
WeekId week_of(Instant t, const LeapTable& table, LeapPolicy policy);

// Half-open [Monday 00:00, next Monday 00:00). The bounds are the same
// instants under every policy; policies differ only in how wide the interval
// measures (see physical_seconds_between).
Span week_bounds(WeekId w, const LeapTable& table, LeapPolicy policy);

// Elapsed physical seconds from a to b. Under FoldLeap/StrictLiteral each
// enclosed +1 entry adds a second and each -1 removes one; IgnoreLeap is the
// plain posix difference.
std::int64_t physical_seconds_between(Instant a, Instant b, const LeapTable& table,
                                      LeapPolicy policy);

// physical_seconds_between floored to whole minutes.
DurationMin duration_between(Instant a, Instant b, const LeapTable& table, LeapPolicy policy);

WeekId next_week(WeekId w);
int weeks_in_iso_year(int iso_year);

// Civil <-> posix conversion (proleptic Gregorian, UTC only).
struct CivilDateTime {
  int year = 1970;
  int month = 1;
  int day = 1;
  int hour = 0;
  int minute = 0;
  int second = 0;
};

std::int64_t days_from_civil(int year, int month, int day);
CivilDateTime civil_from_posix(std::int64_t posix);

// Builds an Instant from civil components. second == 60 yields a leap-flagged
// instant and is accepted only at 23:59; hour == 24 with 00:00 is normalized
// to 00:00:00 of the next day.
Instant make_instant(int year, int month, int day, int hour, int minute, int second);

// RFC 3339 UTC, e.g. "2024-01-08T11:00:00Z"; a leap-flagged instant prints
// and parses with second value 60.
std::string format_instant(Instant t);
Instant parse_instant(std::string_view text);

// Checks the Instant leap_flag invariant against a table: the flag is valid
// only on the last nominal second of a day carrying a +1 entry.
bool leap_flag_valid(Instant t, const LeapTable& table);

}  // namespace dtc::timebase
