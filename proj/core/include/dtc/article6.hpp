#pragma once

#include <cstddef>
#include <vector>

#include "dtc/timebase.hpp"

namespace dtc::article6 {

// Provenance of one entry in a weekly pattern: which daily driving period it
// came from and which week it was attributed to.
struct DdpRef {
  std::size_t ddp_index = 0;
  timebase::WeekId attributed_week;

  friend bool operator==(const DdpRef&, const DdpRef&) = default;
};

// The per-week sequence of daily driving durations the Article 6.1 check
// runs on. daily_driving and provenance are index-aligned.
struct WeeklyDrivingPattern {
  timebase::WeekId week;
  std::vector<timebase::DurationMin> daily_driving;
  std::vector<DdpRef> provenance;

  friend bool operator==(const WeeklyDrivingPattern&, const WeeklyDrivingPattern&) = default;
};

// Thresholds of Article 6.1, kept in one auditable place: 9 h daily limit,
// 10 h extended limit, at most two extensions per week. weekly_dp_max_len
// bounds a well-formed weekly pattern (seven calendar days Monday-Sunday).
struct Article6Params {
  timebase::DurationMin daily_limit{540};
  timebase::DurationMin extended_limit{600};
  int max_extensions = 2;
  int weekly_dp_max_len = 7;

  friend bool operator==(const Article6Params&, const Article6Params&) = default;

  void validate() const;  // daily_limit < extended_limit, counts non-negative
};

// d <= extended_limit ("may be extended to at most 10 hours": inclusive).
bool is_leq_extended(timebase::DurationMin d, const Article6Params& p);

// d > daily_limit ("shall not exceed nine hours": strictly more counts).
bool is_gt_daily(timebase::DurationMin d, const Article6Params& p);

// Format check: at most weekly_dp_max_len entries, every provenance entry
// attributed to the pattern's own week.
bool is_weekly_dp(const WeeklyDrivingPattern& w, const Article6Params& p);

// is_weekly_dp(w) implies (every value <= extended_limit and at most
// max_extensions values > daily_limit). A pattern failing the format check
// passes vacuously; an empty pattern is compliant.
bool check_article6_1(const WeeklyDrivingPattern& w, const Article6Params& p);

}  // namespace dtc::article6
