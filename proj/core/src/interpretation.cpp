#include "dtc/interpretation.hpp"

#include <algorithm>
#include <future>

#include <json.hpp>

namespace dtc::interpretation {

namespace {

using article6::WeeklyDrivingPattern;
using segmentation::DailyDrivingPeriod;
using timebase::DurationMin;
using timebase::Instant;
using timebase::LeapPolicy;
using timebase::LeapTable;
using timebase::Span;
using timebase::WeekId;

// Last instant covered by a non-empty half-open span, for week membership.
Instant last_covered(Span span) {
  if (span.second.leap_flag) return Instant{span.second.posix_seconds, false};
  return Instant{span.second.posix_seconds - 1, false};
}

struct DdpWeeks {
  WeekId start;
  WeekId end;
  bool spanning() const { return start != end; }
};

DdpWeeks ddp_weeks(const DailyDrivingPeriod& d, const LeapTable& table, LeapPolicy leap) {
  return DdpWeeks{timebase::week_of(d.span.first, table, leap),
                  timebase::week_of(last_covered(d.span), table, leap)};
}

class PatternBuilder {
 public:
  void add(WeekId week, DurationMin driving, std::size_t ddp_index) {
    auto [it, inserted] = by_week_.try_emplace(week);
    if (inserted) it->second.week = week;
    it->second.daily_driving.push_back(driving);
    it->second.provenance.push_back(article6::DdpRef{ddp_index, week});
  }

  std::vector<WeeklyDrivingPattern> take() {
    std::vector<WeeklyDrivingPattern> out;
    out.reserve(by_week_.size());
    for (auto& [week, pattern] : by_week_) out.push_back(std::move(pattern));
    return out;
  }

 private:
  std::map<WeekId, WeeklyDrivingPattern> by_week_;
};

// Splits a spanning period at each enclosed week boundary. Each fragment
// carries the driving minutes actually recorded on its side of the boundary,
// so a fragment stays recomputable from its own cited records. Fragments sum
// exactly to the period's driving whenever records are minute-granular (the
// seconds-level identity is exact always).
void add_split_fragments(PatternBuilder& b, const DailyDrivingPeriod& d, std::size_t index,
                         const LeapTable& table, LeapPolicy leap) {
  WeekId week = timebase::week_of(d.span.first, table, leap);
  const WeekId end_week = timebase::week_of(last_covered(d.span), table, leap);
  Instant cursor = d.span.first;
  while (true) {
    const Span bounds = timebase::week_bounds(week, table, leap);
    const Span slice{cursor, std::min(bounds.second, d.span.second)};
    b.add(week, d.driving_within(slice, table, leap), index);
    if (week == end_week) break;
    cursor = bounds.second;
    week = timebase::next_week(week);
  }
}

// Bits are consumed in period order: bit j belongs to the j-th spanning period.
std::vector<WeeklyDrivingPattern> build_for_assignment(
    const std::vector<DailyDrivingPeriod>& ddps, const std::vector<DdpWeeks>& weeks,
    const std::vector<bool>& bits) {
  PatternBuilder b;
  std::size_t bit_pos = 0;
  for (std::size_t i = 0; i < ddps.size(); ++i) {
    if (weeks[i].spanning()) {
      const bool to_end = bits[bit_pos++];
      b.add(to_end ? weeks[i].end : weeks[i].start, ddps[i].driving, i);
    } else {
      b.add(weeks[i].start, ddps[i].driving, i);
    }
  }
  return b.take();
}

VerdictMap verdicts_of(const std::vector<WeeklyDrivingPattern>& patterns,
                       const article6::Article6Params& params) {
  VerdictMap v;
  for (const WeeklyDrivingPattern& p : patterns) {
    v[p.week] = article6::check_article6_1(p, params);
  }
  return v;
}

// OR/AND of per-week verdicts over every enumerated assignment; a week an
// assignment leaves without driving counts as vacuously compliant there.
VerdictMap bound_verdicts(const std::vector<DailyDrivingPeriod>& ddps, bool best,
                          const LeapTable& table, LeapPolicy leap,
                          const article6::Article6Params& params) {
  std::vector<DdpWeeks> weeks;
  weeks.reserve(ddps.size());
  for (const DailyDrivingPeriod& d : ddps) weeks.push_back(ddp_weeks(d, table, leap));
  std::size_t k = 0;
  for (const DdpWeeks& w : weeks) k += w.spanning() ? 1 : 0;

  std::map<WeekId, std::pair<bool, bool>> acc;  // week -> (any, all)
  std::size_t done = 0;
  for (const std::vector<bool>& bits : enumerate_attributions(k)) {
    const VerdictMap v = verdicts_of(build_for_assignment(ddps, weeks, bits), params);
    for (const auto& [week, val] : v) {
      auto it = acc.find(week);
      if (it == acc.end()) {
        // Absent from every earlier assignment: vacuous-true contributions.
        acc.emplace(week, std::make_pair(done > 0 || val, val));
      } else {
        it->second.first = it->second.first || val;
        it->second.second = it->second.second && val;
      }
    }
    for (auto& [week, flags] : acc) {
      if (!v.count(week)) flags.first = true;  // vacuous true this assignment
    }
    ++done;
  }

  VerdictMap out;
  for (const auto& [week, flags] : acc) out[week] = best ? flags.first : flags.second;
  return out;
}

std::vector<WeeklyDrivingPattern> witness_assignment(
    const std::vector<DailyDrivingPeriod>& ddps, bool best, const LeapTable& table,
    LeapPolicy leap, const article6::Article6Params& params) {
  std::vector<DdpWeeks> weeks;
  weeks.reserve(ddps.size());
  for (const DailyDrivingPeriod& d : ddps) weeks.push_back(ddp_weeks(d, table, leap));
  std::size_t k = 0;
  for (const DdpWeeks& w : weeks) k += w.spanning() ? 1 : 0;

  // BestCase maximizes the number of compliant weeks, WorstCase the number of
  // violating weeks; ties go to the first assignment in enumeration order.
  std::vector<WeeklyDrivingPattern> chosen;
  long chosen_score = -1;
  for (const std::vector<bool>& bits : enumerate_attributions(k)) {
    auto patterns = build_for_assignment(ddps, weeks, bits);
    const VerdictMap v = verdicts_of(patterns, params);
    const long compliant = std::count_if(v.begin(), v.end(), [](auto& kv) { return kv.second; });
    const long score = best ? compliant : static_cast<long>(v.size()) - compliant;
    if (score > chosen_score) {
      chosen = std::move(patterns);
      chosen_score = score;
    }
  }
  return chosen;
}

std::vector<DailyDrivingPeriod> apply_weekly_rest_gap(std::vector<DailyDrivingPeriod> ddps,
                                                      WeeklyRestGap gap) {
  if (gap == WeeklyRestGap::Suppress) {
    std::erase_if(ddps, [](const DailyDrivingPeriod& d) {
      return d.preceded_by == segmentation::BoundaryKind::WeeklyRest &&
             d.followed_by == segmentation::BoundaryKind::WeeklyRest;
    });
  }
  return ddps;
}

}  // namespace

std::string InterpretationPolicy::summary() const {
  std::string s;
  s += attribution_label(attribution);
  s += '/';
  s += leap_label(leap);
  s += '/';
  s += edge_label(edge);
  s += '/';
  s += weekly_rest_gap_label(weekly_rest_gap);
  return s;
}

std::vector<std::size_t> spanning_ddp_indices(const std::vector<DailyDrivingPeriod>& ddps,
                                              const LeapTable& table, LeapPolicy leap) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ddps.size(); ++i) {
    if (ddp_weeks(ddps[i], table, leap).spanning()) out.push_back(i);
  }
  return out;
}

std::vector<std::vector<bool>> enumerate_attributions(std::size_t k) {
  if (k > kMaxSpanningDdps) throw AmbiguityBudgetExceeded(k);
  const std::size_t n = std::size_t{1} << k;
  std::vector<std::vector<bool>> out;
  out.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<bool> bits(k);
    for (std::size_t i = 0; i < k; ++i) bits[i] = (v >> i) & 1;
    out.push_back(std::move(bits));
  }
  return out;
}

std::vector<std::vector<bool>> enumerate_attributions(
    const std::vector<DailyDrivingPeriod>& ddps, const LeapTable& table, LeapPolicy leap) {
  return enumerate_attributions(spanning_ddp_indices(ddps, table, leap).size());
}

std::vector<WeeklyDrivingPattern> patterns_for_assignment(
    const std::vector<DailyDrivingPeriod>& ddps, const std::vector<bool>& bits,
    const LeapTable& table, LeapPolicy leap) {
  std::vector<DdpWeeks> weeks;
  weeks.reserve(ddps.size());
  std::size_t k = 0;
  for (const DailyDrivingPeriod& d : ddps) {
    weeks.push_back(ddp_weeks(d, table, leap));
    k += weeks.back().spanning() ? 1 : 0;
  }
  if (bits.size() != k) {
    throw Error("BadAssignment", "assignment holds " + std::to_string(bits.size()) +
                                     " bits for " + std::to_string(k) + " spanning periods");
  }
  return build_for_assignment(ddps, weeks, bits);
}

std::vector<WeeklyDrivingPattern> attribute_to_weeks(
    const std::vector<DailyDrivingPeriod>& ddps, AttributionRule rule, const LeapTable& table,
    LeapPolicy leap, const article6::Article6Params& params) {
  if (rule == AttributionRule::BestCase || rule == AttributionRule::WorstCase) {
    return witness_assignment(ddps, rule == AttributionRule::BestCase, table, leap, params);
  }
  PatternBuilder b;
  for (std::size_t i = 0; i < ddps.size(); ++i) {
    const DdpWeeks w = ddp_weeks(ddps[i], table, leap);
    switch (rule) {
      case AttributionRule::StartWeek:
        b.add(w.start, ddps[i].driving, i);
        break;
      case AttributionRule::EndWeek:
        b.add(w.end, ddps[i].driving, i);
        break;
      case AttributionRule::SplitAtBoundary:
        if (!w.spanning()) {
          b.add(w.start, ddps[i].driving, i);
        } else {
          add_split_fragments(b, ddps[i], i, table, leap);
        }
        break;
      default:
        break;
    }
  }
  return b.take();
}

AttributionOutcome attributed_patterns(const activity::Timeline& t,
                                       const InterpretationPolicy& pol,
                                       const EvalParams& params, const LeapTable& table) {
  params.rest.validate();
  params.article6.validate();
  AttributionOutcome out;
  out.ddps = apply_weekly_rest_gap(
      segmentation::daily_driving_periods(t, params.rest, table, pol.leap, pol.edge),
      pol.weekly_rest_gap);
  out.patterns =
      attribute_to_weeks(out.ddps, pol.attribution, table, pol.leap, params.article6);
  return out;
}

VerdictMap evaluate_policy(const activity::Timeline& t, const InterpretationPolicy& pol,
                           const EvalParams& params, const LeapTable& table) {
  params.rest.validate();
  params.article6.validate();
  auto ddps = apply_weekly_rest_gap(
      segmentation::daily_driving_periods(t, params.rest, table, pol.leap, pol.edge),
      pol.weekly_rest_gap);
  if (pol.attribution == AttributionRule::BestCase ||
      pol.attribution == AttributionRule::WorstCase) {
    return bound_verdicts(ddps, pol.attribution == AttributionRule::BestCase, table,
                          pol.leap, params.article6);
  }
  return verdicts_of(attribute_to_weeks(ddps, pol.attribution, table, pol.leap, params.article6),
                     params.article6);
}

InterpretationReport evaluate_all(const activity::Timeline& t,
                                  const std::vector<InterpretationPolicy>& space,
                                  const EvalParams& params, const LeapTable& table,
                                  bool parallel) {
  if (space.empty()) throw Error("EmptyPolicySpace", "policy space must be non-empty");

  auto evaluate_one = [&](const InterpretationPolicy& pol) {
    PolicyOutcome outcome;
    outcome.policy = pol;
    try {
      outcome.verdicts = evaluate_policy(t, pol, params, table);
    } catch (const Error& e) {
      outcome.error = e.code() + ": " + e.what();
    }
    return outcome;
  };

  InterpretationReport report;
  report.per_policy.reserve(space.size());
  if (parallel) {
    std::vector<std::future<PolicyOutcome>> futures;
    futures.reserve(space.size());
    for (const InterpretationPolicy& pol : space) {
      futures.push_back(std::async(std::launch::async, evaluate_one, pol));
    }
    for (auto& f : futures) report.per_policy.push_back(f.get());
  } else {
    for (const InterpretationPolicy& pol : space) report.per_policy.push_back(evaluate_one(pol));
  }

  // Stability over policies that evaluated: a week must be present with the
  // same verdict everywhere to be stable; presence in only some policies is
  // itself interpretation dependence.
  std::size_t evaluated = 0;
  std::map<WeekId, std::pair<std::size_t, std::size_t>> tally;  // week -> (present, true)
  for (const PolicyOutcome& o : report.per_policy) {
    if (o.error) continue;
    ++evaluated;
    for (const auto& [week, val] : o.verdicts) {
      auto& [present, yes] = tally[week];
      ++present;
      if (val) ++yes;
    }
  }
  for (const auto& [week, counts] : tally) {
    const auto [present, yes] = counts;
    Stability s;
    if (present == evaluated && yes == present) {
      s = Stability::StableCompliant;
    } else if (present == evaluated && yes == 0) {
      s = Stability::StableViolation;
    } else {
      s = Stability::InterpretationDependent;
    }
    report.stability.emplace(week, s);
  }
  return report;
}

std::vector<InterpretationPolicy> default_policy_space() {
  std::vector<InterpretationPolicy> space;
  for (AttributionRule rule : {AttributionRule::StartWeek, AttributionRule::EndWeek,
                               AttributionRule::SplitAtBoundary}) {
    for (LeapPolicy leap : {LeapPolicy::IgnoreLeap, LeapPolicy::FoldLeap}) {
      for (segmentation::EdgePolicy edge :
           {segmentation::EdgePolicy::CountEdges, segmentation::EdgePolicy::StrictArt4k}) {
        space.push_back(InterpretationPolicy{rule, leap, edge, WeeklyRestGap::EmitFlagged});
      }
    }
  }
  return space;
}

const char* attribution_label(AttributionRule r) {
  switch (r) {
    case AttributionRule::StartWeek: return "start_week";
    case AttributionRule::EndWeek: return "end_week";
    case AttributionRule::SplitAtBoundary: return "split_at_boundary";
    case AttributionRule::BestCase: return "best_case";
    case AttributionRule::WorstCase: return "worst_case";
  }
  return "";
}

const char* leap_label(LeapPolicy p) {
  switch (p) {
    case LeapPolicy::IgnoreLeap: return "ignore_leap";
    case LeapPolicy::FoldLeap: return "fold_leap";
    case LeapPolicy::StrictLiteral: return "strict_literal";
  }
  return "";
}

const char* edge_label(segmentation::EdgePolicy e) {
  return e == segmentation::EdgePolicy::CountEdges ? "count_edges" : "strict_art4k";
}

const char* weekly_rest_gap_label(WeeklyRestGap g) {
  return g == WeeklyRestGap::EmitFlagged ? "emit_flagged" : "suppress";
}

const char* stability_label(Stability s) {
  switch (s) {
    case Stability::StableCompliant: return "stable_compliant";
    case Stability::StableViolation: return "stable_violation";
    case Stability::InterpretationDependent: return "interpretation_dependent";
  }
  return "";
}

AttributionRule attribution_from_label(std::string_view s) {
  if (s == "start_week") return AttributionRule::StartWeek;
  if (s == "end_week") return AttributionRule::EndWeek;
  if (s == "split_at_boundary") return AttributionRule::SplitAtBoundary;
  if (s == "best_case") return AttributionRule::BestCase;
  if (s == "worst_case") return AttributionRule::WorstCase;
  throw Error("BadPolicy", "unknown attribution rule: " + std::string(s));
}

LeapPolicy leap_from_label(std::string_view s) {
  if (s == "ignore_leap") return LeapPolicy::IgnoreLeap;
  if (s == "fold_leap") return LeapPolicy::FoldLeap;
  if (s == "strict_literal") return LeapPolicy::StrictLiteral;
  throw Error("BadPolicy", "unknown leap policy: " + std::string(s));
}

segmentation::EdgePolicy edge_from_label(std::string_view s) {
  if (s == "count_edges") return segmentation::EdgePolicy::CountEdges;
  if (s == "strict_art4k") return segmentation::EdgePolicy::StrictArt4k;
  throw Error("BadPolicy", "unknown edge policy: " + std::string(s));
}

WeeklyRestGap weekly_rest_gap_from_label(std::string_view s) {
  if (s == "emit_flagged") return WeeklyRestGap::EmitFlagged;
  if (s == "suppress") return WeeklyRestGap::Suppress;
  throw Error("BadPolicy", "unknown weekly rest gap policy: " + std::string(s));
}

std::string to_json_string(const InterpretationReport& report) {
  nlohmann::ordered_json root;
  nlohmann::ordered_json policies = nlohmann::ordered_json::array();
  for (const PolicyOutcome& o : report.per_policy) {
    nlohmann::ordered_json entry;
    entry["policy"] = {{"attribution", attribution_label(o.policy.attribution)},
                       {"leap", leap_label(o.policy.leap)},
                       {"edge", edge_label(o.policy.edge)},
                       {"weekly_rest_gap", weekly_rest_gap_label(o.policy.weekly_rest_gap)}};
    nlohmann::ordered_json verdicts = nlohmann::ordered_json::object();
    for (const auto& [week, val] : o.verdicts) verdicts[week.str()] = val;
    entry["verdicts"] = std::move(verdicts);
    entry["error"] = o.error ? nlohmann::ordered_json(*o.error) : nlohmann::ordered_json(nullptr);
    policies.push_back(std::move(entry));
  }
  root["policies"] = std::move(policies);
  nlohmann::ordered_json stability = nlohmann::ordered_json::object();
  for (const auto& [week, s] : report.stability) stability[week.str()] = stability_label(s);
  root["stability"] = std::move(stability);
  return root.dump(2);
}

}  // namespace dtc::interpretation
