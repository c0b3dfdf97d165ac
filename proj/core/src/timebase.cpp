#include "dtc/timebase.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace dtc::timebase {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

// Era horizon past the last table entry; adjustments are announced roughly
// six months ahead, so anything this far out is genuinely unknown.
constexpr std::int64_t kEraSlackSeconds = 550 * kSecondsPerDay;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  std::int64_t r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

// 0 = Monday .. 6 = Sunday. Day 0 (1970-01-01) was a Thursday.
int weekday_mon0(std::int64_t days) {
  std::int64_t w = (days + 3) % 7;
  return static_cast<int>(w < 0 ? w + 7 : w);
}

bool is_leap_year(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

int days_in_month(int y, int m) {
  static constexpr int kTable[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap_year(y)) return 29;
  return kTable[m - 1];
}

// Monday (days since epoch) opening ISO week 1 of iso_year: the week that
// contains January 4.
std::int64_t week1_monday(int iso_year) {
  const std::int64_t jan4 = days_from_civil(iso_year, 1, 4);
  return jan4 - weekday_mon0(jan4);
}

WeekId iso_week_of_day(std::int64_t days) {
  const std::int64_t monday = days - weekday_mon0(days);
  const CivilDateTime thursday = civil_from_posix((monday + 3) * kSecondsPerDay);
  const int iso_year = thursday.year;
  const int week = static_cast<int>((monday - week1_monday(iso_year)) / 7) + 1;
  return WeekId{iso_year, week};
}

std::int64_t week_start_day(WeekId w) {
  if (w.iso_week < 1 || w.iso_week > weeks_in_iso_year(w.iso_year)) {
    throw Error("InvalidWeekId",
                "no ISO week " + std::to_string(w.iso_week) + " in year " +
                    std::to_string(w.iso_year));
  }
  return week1_monday(w.iso_year) + static_cast<std::int64_t>(w.iso_week - 1) * 7;
}

void require_defined_boundary(WeekId w, const LeapTable& table, LeapPolicy policy) {
  if (policy != LeapPolicy::StrictLiteral) return;
  const std::int64_t sunday = week_start_day(w) + 6;
  if (auto sign = table.sign_on_day(sunday * kSecondsPerDay); sign && *sign < 0) {
    throw BoundaryUndefined(w);
  }
}

int parse_fixed_int(std::string_view text, std::size_t pos, std::size_t len) {
  int value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) {
      throw Error("BadTimestamp", "malformed timestamp: " + std::string(text));
    }
    value = value * 10 + (text[i] - '0');
  }
  return value;
}

}  // namespace

DurationMin::DurationMin(std::int64_t minutes) : minutes_(minutes) {
  if (minutes < 0) {
    throw Error("NegativeDuration", "duration must be non-negative, got " +
                                        std::to_string(minutes) + " min");
  }
}

BoundaryUndefined::BoundaryUndefined(WeekId w)
    : Error("BoundaryUndefined",
            "week " + w.str() +
          " has a negative leap second on its Sunday; 24:00:00 does not exist"),
      week(w) {}

std::string WeekId::str() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-W%02d", iso_year, iso_week);
  return buf;
}

WeekId WeekId::parse(std::string_view text) {
  // YYYY-WNN
  if (text.size() != 8 || text[4] != '-' || text[5] != 'W') {
    throw Error("BadWeekId", "malformed week id: " + std::string(text));
  }
  WeekId w{parse_fixed_int(text, 0, 4), parse_fixed_int(text, 6, 2)};
  if (w.iso_week < 1 || w.iso_week > weeks_in_iso_year(w.iso_year)) {
    throw Error("BadWeekId", "no such ISO week: " + std::string(text));
  }
  return w;
}

std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDateTime civil_from_posix(std::int64_t posix) {
  const std::int64_t z = floor_div(posix, kSecondsPerDay) + 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : static_cast<unsigned>(-9));

  std::int64_t sod = posix - floor_div(posix, kSecondsPerDay) * kSecondsPerDay;
  CivilDateTime c;
  c.year = static_cast<int>(y + (m <= 2));
  c.month = static_cast<int>(m);
  c.day = static_cast<int>(d);
  c.hour = static_cast<int>(sod / 3600);
  c.minute = static_cast<int>((sod / 60) % 60);
  c.second = static_cast<int>(sod % 60);
  return c;
}

Instant make_instant(int year, int month, int day, int hour, int minute, int second) {
  if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) {
    throw Error("BadTimestamp", "no such calendar date");
  }
  if (hour == 24 && minute == 0 && second == 0) {
    // 24:00:00 denotes the same moment as 00:00:00 of the next day.
    return Instant{(days_from_civil(year, month, day) + 1) * kSecondsPerDay, false};
  }
  if (hour < 0 || hour > 23 || minute < 0 || minute > 59 || second < 0 || second > 60) {
    throw Error("BadTimestamp", "time of day out of range");
  }
  const bool leap = second == 60;
  if (leap && !(hour == 23 && minute == 59)) {
    throw Error("BadTimestamp", "second 60 is only admissible at 23:59");
  }
  const std::int64_t posix = days_from_civil(year, month, day) * kSecondsPerDay +
                             hour * 3600 + minute * 60 + (leap ? 59 : second);
  return Instant{posix, leap};
}

std::string format_instant(Instant t) {
  const CivilDateTime c = civil_from_posix(t.posix_seconds);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", c.year, c.month,
                c.day, c.hour, c.minute, t.leap_flag ? 60 : c.second);
  return buf;
}

Instant parse_instant(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SSZ, exactly.
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
      text[13] != ':' || text[16] != ':' || text[19] != 'Z') {
    throw Error("BadTimestamp", "malformed timestamp: " + std::string(text));
  }
  const int year = parse_fixed_int(text, 0, 4);
  const int month = parse_fixed_int(text, 5, 2);
  const int day = parse_fixed_int(text, 8, 2);
  const int hour = parse_fixed_int(text, 11, 2);
  const int minute = parse_fixed_int(text, 14, 2);
  const int second = parse_fixed_int(text, 17, 2);
  return make_instant(year, month, day, hour, minute, second);
}

LeapTable LeapTable::from_entries(std::vector<LeapEntry> entries) {
  std::int64_t prev = std::numeric_limits<std::int64_t>::min();
  for (const LeapEntry& e : entries) {
    if (e.sign != 1 && e.sign != -1) {
      throw Error("LeapTableSyntax", "leap entry sign must be +1 or -1");
    }
    if (e.day_start % kSecondsPerDay != 0) {
      throw Error("LeapTableSyntax", "leap entry must start at a day boundary");
    }
    if (e.day_start <= prev) {
      throw Error("LeapTableSyntax", "leap entries must be strictly ascending by date");
    }
    prev = e.day_start;
  }
  LeapTable t;
  t.entries_ = std::move(entries);
  return t;
}

LeapTable LeapTable::parse(std::string_view text) {
  std::vector<LeapEntry> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    ++line_no;
    pos = eol + 1;
    if (pos > text.size() && line.empty()) break;

    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;

    // "YYYY-MM-DD +1" or "YYYY-MM-DD -1"
    if (line.size() < 13 || line[4] != '-' || line[7] != '-' || line[10] != ' ') {
      throw Error("LeapTableSyntax",
                  "line " + std::to_string(line_no) + ": expected 'YYYY-MM-DD <+1|-1>'");
    }
    const int year = parse_fixed_int(line, 0, 4);
    const int month = parse_fixed_int(line, 5, 2);
    const int day = parse_fixed_int(line, 8, 2);
    std::string_view signtok = line.substr(11);
    int sign = 0;
    if (signtok == "+1") sign = 1;
    else if (signtok == "-1") sign = -1;
    else
      throw Error("LeapTableSyntax",
                  "line " + std::to_string(line_no) + ": sign must be +1 or -1");
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) {
      throw Error("LeapTableSyntax", "line " + std::to_string(line_no) + ": no such date");
    }
    entries.push_back(LeapEntry{days_from_civil(year, month, day) * kSecondsPerDay, sign});
  }
  return from_entries(std::move(entries));
}

LeapTable LeapTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("FileNotFound", "cannot open leap table: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::int64_t LeapTable::cumulative_offset(std::int64_t posix) const {
  std::int64_t sum = 0;
  for (const LeapEntry& e : entries_) {
    if (e.day_start + kSecondsPerDay > posix) break;
    sum += e.sign;
  }
  return sum;
}

std::optional<int> LeapTable::sign_on_day(std::int64_t day_start) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), day_start,
                             [](const LeapEntry& e, std::int64_t v) { return e.day_start < v; });
  if (it != entries_.end() && it->day_start == day_start) return it->sign;
  return std::nullopt;
}

bool LeapTable::covers(Instant t) const {
  if (entries_.empty()) return false;
  return t.posix_seconds < entries_.back().day_start + kSecondsPerDay + kEraSlackSeconds;
}

WeekId week_of(Instant t, const LeapTable& table, LeapPolicy policy) {
  const WeekId w = iso_week_of_day(floor_div(t.posix_seconds, kSecondsPerDay));
  require_defined_boundary(w, table, policy);
  return w;
}

Span week_bounds(WeekId w, const LeapTable& table, LeapPolicy policy) {
  const std::int64_t start_day = week_start_day(w);
  require_defined_boundary(w, table, policy);
  return {Instant{start_day * kSecondsPerDay, false},
          Instant{(start_day + 7) * kSecondsPerDay, false}};
}

std::int64_t physical_seconds_between(Instant a, Instant b, const LeapTable& table,
                                      LeapPolicy policy) {
  if (a > b) throw NegativeSpan{};
  std::int64_t elapsed = b.posix_seconds - a.posix_seconds;
  if (policy != LeapPolicy::IgnoreLeap) {
    elapsed += table.cumulative_offset(b.posix_seconds) -
               table.cumulative_offset(a.posix_seconds);
    elapsed += (b.leap_flag ? 1 : 0) - (a.leap_flag ? 1 : 0);
  }
  return elapsed;
}

DurationMin duration_between(Instant a, Instant b, const LeapTable& table,
                             LeapPolicy policy) {
  return DurationMin(physical_seconds_between(a, b, table, policy) / 60);
}

WeekId next_week(WeekId w) {
  if (w.iso_week < weeks_in_iso_year(w.iso_year)) return WeekId{w.iso_year, w.iso_week + 1};
  return WeekId{w.iso_year + 1, 1};
}

int weeks_in_iso_year(int iso_year) {
  // December 28 always falls in the year's last ISO week.
  const std::int64_t dec28 = days_from_civil(iso_year, 12, 28);
  const std::int64_t monday = dec28 - weekday_mon0(dec28);
  return static_cast<int>((monday - week1_monday(iso_year)) / 7) + 1;
}

bool leap_flag_valid(Instant t, const LeapTable& table) {
  if (!t.leap_flag) return true;
  const std::int64_t day_start = floor_div(t.posix_seconds, kSecondsPerDay) * kSecondsPerDay;
  if (t.posix_seconds != day_start + kSecondsPerDay - 1) return false;
  const auto sign = table.sign_on_day(day_start);
  return sign && *sign > 0;
}

}  // namespace dtc::timebase
