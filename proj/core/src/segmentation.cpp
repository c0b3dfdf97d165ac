#include "dtc/segmentation.hpp"

#include <algorithm>

#include <json.hpp>

namespace dtc::segmentation {

namespace {

using activity::ActivityKind;
using activity::ActivityRecord;
using timebase::Instant;
using timebase::Span;

const char* boundary_label(BoundaryKind b) {
  switch (b) {
    case BoundaryKind::DailyRest: return "daily_rest";
    case BoundaryKind::WeeklyRest: return "weekly_rest";
    case BoundaryKind::TimelineEdge: return "timeline_edge";
  }
  return "";
}

BoundaryKind boundary_of(RestClass c) {
  return c == RestClass::WeeklyRest ? BoundaryKind::WeeklyRest : BoundaryKind::DailyRest;
}

DailyDrivingPeriod make_period(const activity::Timeline& t, Span span, BoundaryKind before,
                               BoundaryKind after, const timebase::LeapTable& table,
                               timebase::LeapPolicy policy) {
  DailyDrivingPeriod ddp;
  ddp.span = span;
  ddp.preceded_by = before;
  ddp.followed_by = after;
  std::int64_t minutes = 0;
  for (std::size_t i = 0; i < t.records().size(); ++i) {
    const ActivityRecord& r = t.records()[i];
    if (r.kind != ActivityKind::Driving) continue;
    const Instant lo = std::max(r.start, span.first);
    const Instant hi = std::min(r.end, span.second);
    if (!(lo < hi)) continue;
    ddp.slices.push_back(DrivingSlice{i, {lo, hi}});
    minutes += timebase::duration_between(lo, hi, table, policy).minutes();
  }
  ddp.driving = timebase::DurationMin(minutes);
  return ddp;
}

}  // namespace

void RestParams::validate() const {
  if (!(timebase::DurationMin(0) < daily_rest_min && daily_rest_min < weekly_rest_min)) {
    throw Error("BadRestParams", "need 0 < daily_rest_min < weekly_rest_min");
  }
}

timebase::DurationMin DailyDrivingPeriod::driving_within(Span subspan,
                                                         const timebase::LeapTable& table,
                                                         timebase::LeapPolicy policy) const {
  std::int64_t minutes = 0;
  for (const DrivingSlice& s : slices) {
    const Instant lo = std::max(s.span.first, subspan.first);
    const Instant hi = std::min(s.span.second, subspan.second);
    if (lo < hi) minutes += timebase::duration_between(lo, hi, table, policy).minutes();
  }
  return timebase::DurationMin(minutes);
}

std::int64_t DailyDrivingPeriod::driving_seconds_within(Span subspan,
                                                        const timebase::LeapTable& table,
                                                        timebase::LeapPolicy policy) const {
  std::int64_t seconds = 0;
  for (const DrivingSlice& s : slices) {
    const Instant lo = std::max(s.span.first, subspan.first);
    const Instant hi = std::min(s.span.second, subspan.second);
    if (lo < hi) seconds += timebase::physical_seconds_between(lo, hi, table, policy);
  }
  return seconds;
}

std::vector<RestPeriod> find_rest_periods(const activity::Timeline& t, const RestParams& p,
                                          const timebase::LeapTable& table,
                                          timebase::LeapPolicy policy) {
  p.validate();
  std::vector<RestPeriod> out;
  const auto& recs = t.records();
  std::size_t i = 0;
  while (i < recs.size()) {
    if (recs[i].kind != ActivityKind::Rest) {
      ++i;
      continue;
    }
    // Extend across abutting Rest records only; a coverage gap ends the run.
    Span run{recs[i].start, recs[i].end};
    std::size_t j = i + 1;
    while (j < recs.size() && recs[j].kind == ActivityKind::Rest &&
           recs[j].start == run.second) {
      run.second = recs[j].end;
      ++j;
    }
    const auto duration = timebase::duration_between(run.first, run.second, table, policy);
    if (duration >= p.daily_rest_min) {
      out.push_back(RestPeriod{
          run,
          duration >= p.weekly_rest_min ? RestClass::WeeklyRest : RestClass::DailyRest,
          duration});
    }
    i = j;
  }
  return out;
}

std::vector<DailyDrivingPeriod> daily_driving_periods(const activity::Timeline& t,
                                                      const RestParams& p,
                                                      const timebase::LeapTable& table,
                                                      timebase::LeapPolicy policy,
                                                      EdgePolicy edge) {
  const std::vector<RestPeriod> rests = find_rest_periods(t, p, table, policy);
  std::vector<DailyDrivingPeriod> out;
  if (t.empty()) return out;

  const Instant first = t.records().front().start;
  const Instant last = t.records().back().end;

  struct Boundary {
    Instant at;
    BoundaryKind kind;
  };
  std::vector<std::pair<Boundary, Boundary>> gaps;  // (left bound, right bound) per gap

  Boundary prev{first, BoundaryKind::TimelineEdge};
  for (const RestPeriod& r : rests) {
    gaps.push_back({prev, Boundary{r.span.first, boundary_of(r.cls)}});
    prev = Boundary{r.span.second, boundary_of(r.cls)};
  }
  gaps.push_back({prev, Boundary{last, BoundaryKind::TimelineEdge}});

  for (const auto& [left, right] : gaps) {
    if (!(left.at < right.at)) continue;
    if (edge == EdgePolicy::StrictArt4k && (left.kind == BoundaryKind::TimelineEdge ||
                                            right.kind == BoundaryKind::TimelineEdge)) {
      continue;
    }
    out.push_back(make_period(t, {left.at, right.at}, left.kind, right.kind, table, policy));
  }
  return out;
}

std::string to_json_string(const std::vector<DailyDrivingPeriod>& ddps) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const DailyDrivingPeriod& d : ddps) {
    nlohmann::ordered_json obj;
    obj["span"] = {{"start", timebase::format_instant(d.span.first)},
                   {"end", timebase::format_instant(d.span.second)}};
    obj["driving_min"] = d.driving.minutes();
    obj["preceded_by"] = boundary_label(d.preceded_by);
    obj["followed_by"] = boundary_label(d.followed_by);
    nlohmann::ordered_json slices = nlohmann::ordered_json::array();
    for (const DrivingSlice& s : d.slices) {
      slices.push_back({{"record", s.record_index},
                        {"start", timebase::format_instant(s.span.first)},
                        {"end", timebase::format_instant(s.span.second)}});
    }
    obj["slices"] = std::move(slices);
    arr.push_back(std::move(obj));
  }
  return arr.dump(2);
}

}  // namespace dtc::segmentation
