#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dtc/activity.hpp"
#include "support/testutil.hpp"

using namespace dtc::activity;
using dtc::timebase::Instant;
using dtc::timebase::LeapPolicy;
using dtc::timebase::LeapTable;
using testutil::at;
using testutil::rec;

namespace {

const LeapTable kNoLeaps;

Timeline sample3() {
  return testutil::timeline(
      {
          rec(at(2024, 1, 8, 8, 0, 0), at(2024, 1, 8, 12, 0, 0), ActivityKind::Driving),
          rec(at(2024, 1, 8, 12, 0, 0), at(2024, 1, 8, 12, 45, 0), ActivityKind::OtherWork),
          rec(at(2024, 1, 8, 13, 0, 0), at(2024, 1, 8, 22, 30, 0), ActivityKind::Rest,
              RecordSource::Manual),
      },
      "D9");
}

}  // namespace

TEST_CASE("empty input parses to an empty timeline") {
  CHECK(parse_timeline("", LogFormat::Csv).records().empty());
  CHECK(parse_timeline("", LogFormat::Jsonl).records().empty());
  CHECK(parse_timeline("driver_id,start,end,kind,source\n", LogFormat::Csv).records().empty());
}

TEST_CASE("three well-formed CSV rows round trip against the hand-built value") {
  const std::string csv =
      "driver_id,start,end,kind,source\n"
      "D9,2024-01-08T08:00:00Z,2024-01-08T12:00:00Z,DRIVING,AUTO\n"
      "D9,2024-01-08T12:00:00Z,2024-01-08T12:45:00Z,OTHER_WORK,AUTO\n"
      "D9,2024-01-08T13:00:00Z,2024-01-08T22:30:00Z,REST,MANUAL\n";
  const Timeline t = parse_timeline(csv, LogFormat::Csv);
  CHECK(t == sample3());
  CHECK(serialize_timeline(t, LogFormat::Csv) == csv);
}

TEST_CASE("overlapping records are rejected with the offending pair") {
  const std::string csv =
      "driver_id,start,end,kind,source\n"
      "D1,2024-01-08T08:00:00Z,2024-01-08T12:00:00Z,DRIVING,AUTO\n"
      "D1,2024-01-08T11:00:00Z,2024-01-08T13:00:00Z,REST,AUTO\n";
  try {
    parse_timeline(csv, LogFormat::Csv);
    FAIL("expected OverlapError");
  } catch (const OverlapError& e) {
    CHECK(e.first_index == 0);
    CHECK(e.second_index == 1);
  }
}

TEST_CASE("records out of order are rejected with the offending index") {
  try {
    testutil::timeline({
        rec(at(2024, 1, 8, 12, 0, 0), at(2024, 1, 8, 13, 0, 0), ActivityKind::Rest),
        rec(at(2024, 1, 8, 8, 0, 0), at(2024, 1, 8, 9, 0, 0), ActivityKind::Driving),
    });
    FAIL("expected OrderError");
  } catch (const OrderError& e) {
    CHECK(e.index == 1);
  }
}

TEST_CASE("parser names the first bad line") {
  CHECK_THROWS_AS(parse_timeline("driver_id,start,end,kind,source\nD1,x,y,DRIVING,AUTO\n",
                                 LogFormat::Csv),
                  SyntaxError);
  try {
    parse_timeline(
        "driver_id,start,end,kind,source\n"
        "D1,2024-01-08T08:00:00Z,2024-01-08T09:00:00Z,,AUTO\n",
        LogFormat::Csv);
    FAIL("expected EmptyKindError");
  } catch (const EmptyKindError& e) {
    CHECK(e.line == 2);
  }
  CHECK_THROWS_AS(parse_timeline("driver_id,start,end\n", LogFormat::Csv), SyntaxError);
  CHECK_THROWS_AS(
      parse_timeline("driver_id,start,end,kind,source\n"
                     "D1,2024-01-08T08:00:00Z,2024-01-08T09:00:00Z,NAPPING,AUTO\n",
                     LogFormat::Csv),
      SyntaxError);
  // driver_id must not change mid-file.
  CHECK_THROWS_AS(
      parse_timeline("driver_id,start,end,kind,source\n"
                     "D1,2024-01-08T08:00:00Z,2024-01-08T09:00:00Z,REST,AUTO\n"
                     "D2,2024-01-08T09:00:00Z,2024-01-08T10:00:00Z,REST,AUTO\n",
                     LogFormat::Csv),
      SyntaxError);
}

TEST_CASE("jsonl parses and serializes the same data") {
  const Timeline t = sample3();
  const std::string jsonl = serialize_timeline(t, LogFormat::Jsonl);
  CHECK(parse_timeline(jsonl, LogFormat::Jsonl) == t);
  CHECK_THROWS_AS(parse_timeline("{not json}\n", LogFormat::Jsonl), SyntaxError);
  CHECK_THROWS_AS(parse_timeline(R"({"driver_id":"D1"})", LogFormat::Jsonl), SyntaxError);
}

TEST_CASE("empty timeline serializes to a header-only CSV") {
  CHECK(serialize_timeline(Timeline{}, LogFormat::Csv) == "driver_id,start,end,kind,source\n");
  CHECK(serialize_timeline(Timeline{}, LogFormat::Jsonl).empty());
}

TEST_CASE("a leap-flagged bound encodes second value 60 and round trips") {
  const Timeline t = testutil::timeline(
      {rec(at(2016, 12, 31, 23, 0, 0), at(2016, 12, 31, 23, 59, 60), ActivityKind::Driving)},
      "D6");
  const std::string csv = serialize_timeline(t, LogFormat::Csv);
  CHECK(csv.find("2016-12-31T23:59:60Z") != std::string::npos);
  CHECK(parse_timeline(csv, LogFormat::Csv) == t);
}

TEST_CASE("24:00:00 normalizes on input to next midnight") {
  const Timeline t = parse_timeline(
      "driver_id,start,end,kind,source\n"
      "D1,2024-01-07T20:00:00Z,2024-01-07T24:00:00Z,DRIVING,AUTO\n",
      LogFormat::Csv);
  CHECK(t.records()[0].end == at(2024, 1, 8, 0, 0, 0));
  CHECK(serialize_timeline(t, LogFormat::Csv).find("2024-01-08T00:00:00Z") != std::string::npos);
}

TEST_CASE("total_driving examples") {
  const dtc::timebase::Span day8{at(2024, 1, 8), at(2024, 1, 9)};
  const Timeline one = testutil::timeline(
      {rec(at(2024, 1, 8, 8, 0, 0), at(2024, 1, 8, 12, 0, 0), ActivityKind::Driving)});
  CHECK(total_driving(one, day8, kNoLeaps, LeapPolicy::FoldLeap).minutes() == 240);

  const Timeline rest_only = testutil::timeline(
      {rec(at(2024, 1, 8, 8, 0, 0), at(2024, 1, 8, 20, 0, 0), ActivityKind::Rest)});
  CHECK(total_driving(rest_only, day8, kNoLeaps, LeapPolicy::FoldLeap).minutes() == 0);

  // Driving 23:00 to 01:00 next day, clipped to the first day.
  const Timeline crossing = testutil::timeline(
      {rec(at(2024, 1, 8, 23, 0, 0), at(2024, 1, 9, 1, 0, 0), ActivityKind::Driving)});
  CHECK(total_driving(crossing, day8, kNoLeaps, LeapPolicy::FoldLeap).minutes() == 60);
  CHECK(testutil::oracle_driving_minutes(crossing, day8) == 60);

  CHECK_THROWS_AS(total_driving(one, {day8.second, day8.first}, kNoLeaps, LeapPolicy::FoldLeap),
                  dtc::timebase::NegativeSpan);
}

TEST_CASE("property: total_driving matches the minute-membership oracle") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Timeline t = testutil::random_timeline(rng);
    if (t.records().empty()) continue;
    const dtc::timebase::Span whole{t.records().front().start, t.records().back().end};
    CHECK(total_driving(t, whole, kNoLeaps, LeapPolicy::FoldLeap).minutes() ==
          testutil::oracle_driving_minutes(t, whole));
  }
}

TEST_CASE("property: total_driving is monotone in the span") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<std::int64_t> widen(0, 86400);
  for (int i = 0; i < 200; ++i) {
    const Timeline t = testutil::random_timeline(rng);
    if (t.records().empty()) continue;
    const Instant lo = t.records().front().start;
    const Instant hi = t.records().back().end;
    const dtc::timebase::Span inner{Instant{lo.posix_seconds + widen(rng), false},
                                    Instant{hi.posix_seconds - widen(rng), false}};
    if (inner.first > inner.second) continue;
    const dtc::timebase::Span outer{lo, hi};
    CHECK(total_driving(t, inner, kNoLeaps, LeapPolicy::FoldLeap) <=
          total_driving(t, outer, kNoLeaps, LeapPolicy::FoldLeap));
  }
}

TEST_CASE("property: driving seconds are additive over any partition of the span") {
  std::mt19937_64 rng(13);
  testutil::TimelineGenOptions opt;
  opt.minute_granular = false;  // stress sub-minute boundaries
  for (int i = 0; i < 200; ++i) {
    const Timeline t = testutil::random_timeline(rng, opt);
    if (t.records().empty()) continue;
    const Instant lo = t.records().front().start;
    const Instant hi = t.records().back().end;
    std::uniform_int_distribution<std::int64_t> cut(lo.posix_seconds, hi.posix_seconds);
    std::vector<std::int64_t> cuts = {lo.posix_seconds, hi.posix_seconds};
    for (int c = 0; c < 5; ++c) cuts.push_back(cut(rng));
    std::sort(cuts.begin(), cuts.end());
    std::int64_t pieces = 0;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      pieces += driving_seconds(t, {Instant{cuts[j], false}, Instant{cuts[j + 1], false}},
                                kNoLeaps, LeapPolicy::FoldLeap);
    }
    CHECK(pieces == driving_seconds(t, {lo, hi}, kNoLeaps, LeapPolicy::FoldLeap));
  }
}

TEST_CASE("property: parse after serialize is the identity on valid timelines") {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 150; ++i) {
    const Timeline t = testutil::random_timeline(rng);
    for (LogFormat f : {LogFormat::Csv, LogFormat::Jsonl}) {
      const std::string bytes = serialize_timeline(t, f);
      CHECK(parse_timeline(bytes, f) == t);
      // Serialization of a normalized timeline is idempotent.
      CHECK(serialize_timeline(parse_timeline(bytes, f), f) == bytes);
    }
  }
}

TEST_CASE("leap flag validation against a table") {
  const LeapTable table =
      LeapTable::from_entries({{at(2016, 12, 31).posix_seconds, 1}});
  const Timeline good = testutil::timeline(
      {rec(at(2016, 12, 31, 23, 0, 0), at(2016, 12, 31, 23, 59, 60), ActivityKind::Driving)});
  CHECK_NOTHROW(validate_leap_flags(good, table));
  CHECK_THROWS_AS(validate_leap_flags(good, kNoLeaps), dtc::Error);
}
