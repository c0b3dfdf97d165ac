#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dtc/activity.hpp"
#include "dtc/timebase.hpp"

namespace dtc::segmentation {

// Qualifying-rest thresholds. The defaults (9 h daily, 45 h weekly) are
// configuration, not ground truth: the segmentation contract only needs
// "long enough to bound a daily driving period".
struct RestParams {
  timebase::DurationMin daily_rest_min{540};
  timebase::DurationMin weekly_rest_min{2700};

  friend bool operator==(const RestParams&, const RestParams&) = default;

  void validate() const;  // 0 < daily_rest_min < weekly_rest_min
};

enum class RestClass { DailyRest, WeeklyRest };

struct RestPeriod {
  timebase::Span span;
  RestClass cls = RestClass::DailyRest;
  timebase::DurationMin duration;
};

// What bounds a daily driving period on each side.
enum class BoundaryKind { DailyRest, WeeklyRest, TimelineEdge };

// Whether timeline edges act as period boundaries. StrictArt4k emits only
// periods bounded by actual rest on both sides, under which a driver with no
// recorded rest has no daily driving time at all; CountEdges treats the
// first/last recorded instants as boundaries.
enum class EdgePolicy { CountEdges, StrictArt4k };

// A Driving record clipped to one period's span, by source record index.
struct DrivingSlice {
  std::size_t record_index = 0;
  timebase::Span span;
};

// Accumulated driving between two qualifying rest boundaries. Not a clock
// day: the span runs from the end of one qualifying rest to the start of the
// next. `slices` carries the contributing Driving records so that `driving`
// is recomputable from the period alone.
struct DailyDrivingPeriod {
  timebase::Span span;
  timebase::DurationMin driving;
  BoundaryKind preceded_by = BoundaryKind::TimelineEdge;
  BoundaryKind followed_by = BoundaryKind::TimelineEdge;
  std::vector<DrivingSlice> slices;

  // Whole driving minutes within a sub-span, floored per slice; equals
  // `driving` when the sub-span covers the whole period.
  timebase::DurationMin driving_within(timebase::Span subspan,
                                       const timebase::LeapTable& table,
                                       timebase::LeapPolicy policy) const;
  std::int64_t driving_seconds_within(timebase::Span subspan,
                                      const timebase::LeapTable& table,
                                      timebase::LeapPolicy policy) const;
};

// Maximal runs of abutting Rest records whose duration reaches
// daily_rest_min, classified WeeklyRest when it reaches weekly_rest_min.
// Runs do not extend across coverage gaps.
std::vector<RestPeriod> find_rest_periods(const activity::Timeline& t, const RestParams& p,
                                          const timebase::LeapTable& table,
                                          timebase::LeapPolicy policy);

// One period per gap between consecutive qualifying rests (plus timeline
// edges under CountEdges). Zero-driving periods are retained; zero-width
// gaps are not periods.
std::vector<DailyDrivingPeriod> daily_driving_periods(const activity::Timeline& t,
                                                      const RestParams& p,
                                                      const timebase::LeapTable& table,
                                                      timebase::LeapPolicy policy,
                                                      EdgePolicy edge);

std::string to_json_string(const std::vector<DailyDrivingPeriod>& ddps);

}  // namespace dtc::segmentation
