#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "dtc/segmentation.hpp"
#include "support/testutil.hpp"

using namespace dtc::segmentation;
using dtc::activity::ActivityKind;
using dtc::activity::Timeline;
using dtc::timebase::Instant;
using dtc::timebase::LeapPolicy;
using dtc::timebase::LeapTable;
using testutil::at;
using testutil::rec;

namespace {

const LeapTable kNoLeaps;
const RestParams kRest;

std::vector<DailyDrivingPeriod> ddps_of(const Timeline& t,
                                        EdgePolicy edge = EdgePolicy::CountEdges,
                                        const RestParams& p = kRest) {
  return daily_driving_periods(t, p, kNoLeaps, LeapPolicy::FoldLeap, edge);
}

}  // namespace

TEST_CASE("rest classification by duration") {
  const Timeline daily = testutil::timeline(
      {rec(at(2024, 1, 8, 8, 0, 0), at(2024, 1, 8, 19, 0, 0), ActivityKind::Rest)});  // 660 min
  auto rests = find_rest_periods(daily, kRest, kNoLeaps, LeapPolicy::FoldLeap);
  REQUIRE(rests.size() == 1);
  CHECK(rests[0].cls == RestClass::DailyRest);
  CHECK(rests[0].duration.minutes() == 660);

  // Exactly at the weekly threshold: inclusive.
  const Timeline weekly = testutil::timeline(
      {rec(at(2024, 1, 8, 0, 0, 0), at(2024, 1, 9, 21, 0, 0), ActivityKind::Rest)});  // 2700 min
  rests = find_rest_periods(weekly, kRest, kNoLeaps, LeapPolicy::FoldLeap);
  REQUIRE(rests.size() == 1);
  CHECK(rests[0].cls == RestClass::WeeklyRest);

  // 539 minutes does not qualify at all.
  const Timeline short_rest = testutil::timeline(
      {rec(at(2024, 1, 8, 8, 0, 0), at(2024, 1, 8, 16, 59, 0), ActivityKind::Rest)});
  CHECK(find_rest_periods(short_rest, kRest, kNoLeaps, LeapPolicy::FoldLeap).empty());
}

TEST_CASE("abutting rest records merge into one maximal run") {
  const Timeline t = testutil::timeline({
      rec(at(2024, 1, 8, 8, 0, 0), at(2024, 1, 8, 13, 0, 0), ActivityKind::Rest),   // 300
      rec(at(2024, 1, 8, 13, 0, 0), at(2024, 1, 8, 18, 0, 0), ActivityKind::Rest),  // 300
  });
  const auto rests = find_rest_periods(t, kRest, kNoLeaps, LeapPolicy::FoldLeap);
  const auto runs = testutil::oracle_rest_runs(t);
  REQUIRE(runs.size() == 1);
  REQUIRE(rests.size() == 1);
  CHECK(rests[0].span == runs[0]);
  CHECK(rests[0].duration.minutes() == 600);
}

TEST_CASE("rest runs do not merge across coverage gaps") {
  const Timeline t = testutil::timeline({
      rec(at(2024, 1, 8, 8, 0, 0), at(2024, 1, 8, 13, 0, 0), ActivityKind::Rest),
      // one-minute gap
      rec(at(2024, 1, 8, 13, 1, 0), at(2024, 1, 8, 18, 0, 0), ActivityKind::Rest),
  });
  CHECK(find_rest_periods(t, kRest, kNoLeaps, LeapPolicy::FoldLeap).empty());  // 300 + 299 apart
}

TEST_CASE("one daily driving period between two rests") {
  const Timeline t = testutil::timeline({
      rec(at(2024, 1, 8, 0, 0, 0), at(2024, 1, 8, 11, 0, 0), ActivityKind::Rest),
      rec(at(2024, 1, 8, 11, 0, 0), at(2024, 1, 8, 15, 0, 0), ActivityKind::Driving),
      rec(at(2024, 1, 8, 15, 0, 0), at(2024, 1, 9, 2, 0, 0), ActivityKind::Rest),
  });
  const auto ddps = ddps_of(t);
  REQUIRE(ddps.size() == 1);
  CHECK(ddps[0].driving.minutes() == 240);
  CHECK(ddps[0].preceded_by == BoundaryKind::DailyRest);
  CHECK(ddps[0].followed_by == BoundaryKind::DailyRest);
  CHECK(ddps[0].span.first == at(2024, 1, 8, 11, 0, 0));
  CHECK(ddps[0].span.second == at(2024, 1, 8, 15, 0, 0));
}

TEST_CASE("a sub-threshold break does not split the period") {
  const Timeline t = testutil::timeline({
      rec(at(2024, 1, 8, 0, 0, 0), at(2024, 1, 8, 11, 0, 0), ActivityKind::Rest),
      rec(at(2024, 1, 8, 11, 0, 0), at(2024, 1, 8, 14, 0, 0), ActivityKind::Driving),
      rec(at(2024, 1, 8, 14, 0, 0), at(2024, 1, 8, 14, 45, 0), ActivityKind::OtherWork),
      rec(at(2024, 1, 8, 14, 45, 0), at(2024, 1, 8, 17, 45, 0), ActivityKind::Driving),
      rec(at(2024, 1, 8, 17, 45, 0), at(2024, 1, 9, 5, 0, 0), ActivityKind::Rest),
  });
  const auto ddps = ddps_of(t);
  REQUIRE(ddps.size() == 1);
  CHECK(ddps[0].driving.minutes() == 360);
  CHECK(ddps[0].slices.size() == 2);
  // A 45-minute rest would not split either: below daily_rest_min.
  auto records = t.records();
  records[2].kind = ActivityKind::Rest;
  const auto ddps2 = ddps_of(testutil::timeline(std::move(records)));
  REQUIRE(ddps2.size() == 1);
  CHECK(ddps2[0].driving.minutes() == 360);
}

TEST_CASE("edge policy decides whether timeline edges bound periods") {
  const Timeline t = testutil::timeline({
      rec(at(2024, 1, 8, 8, 0, 0), at(2024, 1, 8, 16, 0, 0), ActivityKind::Driving),
  });
  const auto counted = ddps_of(t, EdgePolicy::CountEdges);
  REQUIRE(counted.size() == 1);
  CHECK(counted[0].preceded_by == BoundaryKind::TimelineEdge);
  CHECK(counted[0].followed_by == BoundaryKind::TimelineEdge);
  CHECK(counted[0].driving.minutes() == 480);
  // Under the strict reading a driver with no recorded rest has no daily
  // driving time at all.
  CHECK(ddps_of(t, EdgePolicy::StrictArt4k).empty());
}

TEST_CASE("zero-driving periods are retained, zero-width gaps are not") {
  const Timeline t = testutil::timeline({
      rec(at(2024, 1, 8, 0, 0, 0), at(2024, 1, 8, 11, 0, 0), ActivityKind::Rest),
      rec(at(2024, 1, 8, 11, 0, 0), at(2024, 1, 8, 20, 0, 0), ActivityKind::OtherWork),
      rec(at(2024, 1, 8, 20, 0, 0), at(2024, 1, 9, 7, 0, 0), ActivityKind::Rest),
  });
  const auto ddps = ddps_of(t);
  REQUIRE(ddps.size() == 1);  // leading/trailing edge gaps are zero width
  CHECK(ddps[0].driving.minutes() == 0);
  CHECK(ddps[0].slices.empty());
}

TEST_CASE("weekly rest boundaries are flagged on the period") {
  const Timeline t = testutil::timeline({
      rec(at(2024, 1, 1, 0, 0, 0), at(2024, 1, 3, 0, 0, 0), ActivityKind::Rest),  // weekly
      rec(at(2024, 1, 3, 0, 0, 0), at(2024, 1, 3, 5, 0, 0), ActivityKind::Driving),
      rec(at(2024, 1, 3, 5, 0, 0), at(2024, 1, 5, 6, 0, 0), ActivityKind::Rest),  // weekly
  });
  const auto ddps = ddps_of(t);
  REQUIRE(ddps.size() == 1);
  CHECK(ddps[0].preceded_by == BoundaryKind::WeeklyRest);
  CHECK(ddps[0].followed_by == BoundaryKind::WeeklyRest);
}

TEST_CASE("property: conservation of driving minutes across periods") {
  std::mt19937_64 rng(21);
  testutil::TimelineGenOptions opt;
  opt.minute_granular = false;  // conservation holds at any granularity
  for (int i = 0; i < 300; ++i) {
    const Timeline t = testutil::random_timeline(rng, opt);
    if (t.records().empty()) continue;
    const auto ddps = ddps_of(t);
    std::int64_t sum = 0;
    for (const auto& d : ddps) sum += d.driving.minutes();
    const auto whole = dtc::activity::total_driving(
        t, {t.records().front().start, t.records().back().end}, kNoLeaps, LeapPolicy::FoldLeap);
    CHECK(sum == whole.minutes());
  }
}

TEST_CASE("property: no qualifying rest intersects a period interior") {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 200; ++i) {
    const Timeline t = testutil::random_timeline(rng);
    const auto rests = find_rest_periods(t, kRest, kNoLeaps, LeapPolicy::FoldLeap);
    for (const auto& d : ddps_of(t)) {
      for (const auto& r : rests) {
        const Instant lo = std::max(r.span.first, d.span.first);
        const Instant hi = std::min(r.span.second, d.span.second);
        CHECK(!(lo < hi));  // empty intersection
      }
    }
  }
}

TEST_CASE("property: raising the daily rest threshold only merges periods") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 200; ++i) {
    const Timeline t = testutil::random_timeline(rng);
    RestParams low;
    RestParams high;
    high.daily_rest_min = dtc::timebase::DurationMin(720);
    const auto fine = ddps_of(t, EdgePolicy::CountEdges, low);
    const auto coarse = ddps_of(t, EdgePolicy::CountEdges, high);
    CHECK(coarse.size() <= fine.size());
    // Each coarse period's driving is a sum of consecutive fine periods'.
    std::size_t j = 0;
    for (const auto& big : coarse) {
      std::int64_t sum = 0;
      while (j < fine.size() && fine[j].span.second <= big.span.second) {
        if (fine[j].span.first >= big.span.first) sum += fine[j].driving.minutes();
        ++j;
      }
      CHECK(sum == big.driving.minutes());
    }
  }
}

TEST_CASE("property: identical inputs give identical outputs") {
  std::mt19937_64 rng(24);
  const Timeline t = testutil::random_timeline(rng);
  const auto a = ddps_of(t);
  const auto b = ddps_of(t);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].span == b[i].span);
    CHECK(a[i].driving.minutes() == b[i].driving.minutes());
  }
}

TEST_CASE("rest params are validated") {
  RestParams bad;
  bad.daily_rest_min = dtc::timebase::DurationMin(3000);
  CHECK_THROWS_AS(bad.validate(), dtc::Error);
  CHECK_THROWS_AS(find_rest_periods(Timeline{}, bad, kNoLeaps, LeapPolicy::FoldLeap), dtc::Error);
}
