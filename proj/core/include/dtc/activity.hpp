#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dtc/error.hpp"
#include "dtc/timebase.hpp"

namespace dtc::activity {

enum class ActivityKind { Driving, Rest, OtherWork, Availability };
enum class RecordSource { Automatic, Manual };

std::string_view kind_label(ActivityKind k);      // "DRIVING", "REST", ...
std::string_view source_label(RecordSource s);    // "AUTO", "MANUAL"
ActivityKind kind_from_label(std::string_view label);
RecordSource source_from_label(std::string_view label);

// One recorded activity over the half-open span [start, end).
struct ActivityRecord {
  timebase::Instant start;
  timebase::Instant end;
  ActivityKind kind = ActivityKind::Rest;
  RecordSource source = RecordSource::Automatic;

  friend bool operator==(const ActivityRecord&, const ActivityRecord&) = default;
};

struct SyntaxError : Error {
  std::size_t line;
  SyntaxError(std::size_t line_no, const std::string& detail)
      : Error("SyntaxError", "line " + std::to_string(line_no) + ": " + detail),
        line(line_no) {}
};

struct EmptyKindError : Error {
  std::size_t line;
  explicit EmptyKindError(std::size_t line_no)
      : Error("EmptyKind", "line " + std::to_string(line_no) + ": empty activity kind"),
        line(line_no) {}
};

struct OrderError : Error {
  std::size_t index;
  explicit OrderError(std::size_t idx)
      : Error("OrderError",
              "record " + std::to_string(idx) + " starts before its predecessor"),
        index(idx) {}
};

struct OverlapError : Error {
  std::size_t first_index;
  std::size_t second_index;
  OverlapError(std::size_t a, std::size_t b)
      : Error("OverlapError",
              "records " + std::to_string(a) + " and " + std::to_string(b) + " overlap"),
        first_index(a),
        second_index(b) {}
};

struct InvalidRecordError : Error {
  std::size_t index;
  explicit InvalidRecordError(std::size_t idx)
      : Error("InvalidRecord", "record " + std::to_string(idx) + " has end <= start"),
        index(idx) {}
};

// Chronological, non-overlapping activity log for one driver. Gaps between
// records are permitted; they are unknown activity, neither driving nor rest.
class Timeline {
 public:
  Timeline() = default;

  // Validates record invariants: start < end per record, ascending starts,
  // pairwise non-overlap. Throws InvalidRecordError / OrderError /
  // OverlapError naming the first offender.
  static Timeline validated(std::string driver_id, std::vector<ActivityRecord> records);

  const std::string& driver_id() const noexcept { return driver_id_; }
  const std::vector<ActivityRecord>& records() const noexcept { return records_; }
  bool empty() const noexcept { return records_.empty(); }

  friend bool operator==(const Timeline&, const Timeline&) = default;

 private:
  std::string driver_id_;
  std::vector<ActivityRecord> records_;
};

enum class LogFormat { Csv, Jsonl };

// CSV: header "driver_id,start,end,kind,source", RFC 3339 UTC instants with
// second value 60 for leap-flagged instants. JSONL: one object per line with
// the same field names. 24:00:00 timestamps are normalized on input.
Timeline parse_timeline(std::string_view input, LogFormat format);
Timeline load_timeline(const std::string& path, LogFormat format);
std::string serialize_timeline(const Timeline& t, LogFormat format);

// Exact physical seconds of Driving activity within the half-open span; the
// pre-rounding quantity, additive over any partition of the span.
std::int64_t driving_seconds(const Timeline& t, timebase::Span span,
                             const timebase::LeapTable& table, timebase::LeapPolicy policy);

// Sum over Driving records of duration_between applied to the record clipped
// to the span: whole minutes per record, floored before summation.
timebase::DurationMin total_driving(const Timeline& t, timebase::Span span,
                                    const timebase::LeapTable& table,
                                    timebase::LeapPolicy policy);

// Enforces the Instant leap_flag invariant on every record bound; throws
// Error("InvalidLeapInstant") naming the first offending record.
void validate_leap_flags(const Timeline& t, const timebase::LeapTable& table);

}  // namespace dtc::activity
