#include "dtc/article6.hpp"

#include <algorithm>

#include "dtc/error.hpp"

namespace dtc::article6 {

void Article6Params::validate() const {
  // Equal limits are admitted: they degenerate the check to `all <= limit`.
  if (extended_limit < daily_limit) {
    throw Error("BadArticle6Params", "daily_limit must not exceed extended_limit");
  }
  if (max_extensions < 0) throw Error("BadArticle6Params", "max_extensions must be >= 0");
  if (weekly_dp_max_len < 1) throw Error("BadArticle6Params", "weekly_dp_max_len must be >= 1");
}

bool is_leq_extended(timebase::DurationMin d, const Article6Params& p) {
  return d <= p.extended_limit;
}

bool is_gt_daily(timebase::DurationMin d, const Article6Params& p) {
  return d > p.daily_limit;
}

bool is_weekly_dp(const WeeklyDrivingPattern& w, const Article6Params& p) {
  if (w.daily_driving.size() != w.provenance.size()) return false;
  if (w.daily_driving.size() > static_cast<std::size_t>(p.weekly_dp_max_len)) return false;
  return std::all_of(w.provenance.begin(), w.provenance.end(),
                     [&](const DdpRef& r) { return r.attributed_week == w.week; });
}

bool check_article6_1(const WeeklyDrivingPattern& w, const Article6Params& p) {
  if (!is_weekly_dp(w, p)) return true;  // implication with a false antecedent
  const bool all_within_extended =
      std::all_of(w.daily_driving.begin(), w.daily_driving.end(),
                  [&](timebase::DurationMin d) { return is_leq_extended(d, p); });
  const auto extensions =
      std::count_if(w.daily_driving.begin(), w.daily_driving.end(),
                    [&](timebase::DurationMin d) { return is_gt_daily(d, p); });
  return all_within_extended && extensions <= p.max_extensions;
}

}  // namespace dtc::article6
