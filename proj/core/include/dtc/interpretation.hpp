#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtc/article6.hpp"
#include "dtc/segmentation.hpp"

namespace dtc::interpretation {

// How a daily driving period spanning the Sunday/Monday boundary is assigned
// to a week. StartWeek/EndWeek/SplitAtBoundary are single readings; BestCase
// and WorstCase are bounds over every start/end assignment.
enum class AttributionRule { StartWeek, EndWeek, SplitAtBoundary, BestCase, WorstCase };

// Treatment of a period lying between two consecutive weekly rests, whose
// status as "daily" driving the strict Art. 4 reading leaves unclear.
enum class WeeklyRestGap { EmitFlagged, Suppress };

// One point in the space of disambiguation choices the Regulation's text
// leaves open.
struct InterpretationPolicy {
  AttributionRule attribution = AttributionRule::StartWeek;
  timebase::LeapPolicy leap = timebase::LeapPolicy::FoldLeap;
  segmentation::EdgePolicy edge = segmentation::EdgePolicy::CountEdges;
  WeeklyRestGap weekly_rest_gap = WeeklyRestGap::EmitFlagged;

  friend auto operator<=>(const InterpretationPolicy&, const InterpretationPolicy&) = default;

  std::string summary() const;  // "start_week/fold_leap/count_edges/emit_flagged"
};

struct EvalParams {
  segmentation::RestParams rest;
  article6::Article6Params article6;

  friend bool operator==(const EvalParams&, const EvalParams&) = default;
};

using VerdictMap = std::map<timebase::WeekId, bool>;

struct PolicyOutcome {
  InterpretationPolicy policy;
  VerdictMap verdicts;
  std::optional<std::string> error;  // "<code>: <detail>" when evaluation failed
};

enum class Stability { StableCompliant, StableViolation, InterpretationDependent };

// Per-policy verdicts plus a per-week stability classification: a week is
// stable only when every evaluated policy agrees on it (including agreeing
// that it holds driving at all).
struct InterpretationReport {
  std::vector<PolicyOutcome> per_policy;
  std::map<timebase::WeekId, Stability> stability;
};

struct AmbiguityBudgetExceeded : Error {
  explicit AmbiguityBudgetExceeded(std::size_t k)
      : Error("AmbiguityBudgetExceeded",
              std::to_string(k) + " boundary-spanning periods exceed the enumeration budget") {}
};

// Enumeration budget: at most 2^20 assignments.
inline constexpr std::size_t kMaxSpanningDdps = 20;

// Indices of periods whose span crosses an ISO week boundary.
std::vector<std::size_t> spanning_ddp_indices(
    const std::vector<segmentation::DailyDrivingPeriod>& ddps,
    const timebase::LeapTable& table, timebase::LeapPolicy leap);

// All 2^k start/end assignments of k spanning periods, in binary counting
// order with the least-significant bit belonging to the earliest period;
// bit set = assign to the end week.
std::vector<std::vector<bool>> enumerate_attributions(std::size_t k);
std::vector<std::vector<bool>> enumerate_attributions(
    const std::vector<segmentation::DailyDrivingPeriod>& ddps,
    const timebase::LeapTable& table, timebase::LeapPolicy leap);

// Weekly patterns for one explicit start/end assignment of the spanning
// periods; bits follow the enumerate_attributions convention.
std::vector<article6::WeeklyDrivingPattern> patterns_for_assignment(
    const std::vector<segmentation::DailyDrivingPeriod>& ddps, const std::vector<bool>& bits,
    const timebase::LeapTable& table, timebase::LeapPolicy leap);

// Groups periods into weekly patterns under one attribution rule. Periods
// wholly inside a week always go to that week. For BestCase/WorstCase this
// returns the witness assignment that maximizes/minimizes the number of
// compliant weeks (first such in enumeration order); the per-week bound
// semantics live in evaluate_policy.
std::vector<article6::WeeklyDrivingPattern> attribute_to_weeks(
    const std::vector<segmentation::DailyDrivingPeriod>& ddps, AttributionRule rule,
    const timebase::LeapTable& table, timebase::LeapPolicy leap,
    const article6::Article6Params& params = {});

// Segmentation plus attribution under one policy, exposing both the filtered
// periods and the weekly patterns built from them; the substrate for
// decision documents.
struct AttributionOutcome {
  std::vector<segmentation::DailyDrivingPeriod> ddps;
  std::vector<article6::WeeklyDrivingPattern> patterns;
};

AttributionOutcome attributed_patterns(const activity::Timeline& t,
                                       const InterpretationPolicy& pol, const EvalParams& params,
                                       const timebase::LeapTable& table);

// Segmentation -> attribution -> per-week Article 6.1 verdicts. Weeks with no
// attributed driving are absent. Under BestCase/WorstCase the verdict for a
// week is the OR/AND of its verdict over every enumerated assignment (weeks a
// given assignment leaves empty count as vacuously compliant in that
// assignment).
VerdictMap evaluate_policy(const activity::Timeline& t, const InterpretationPolicy& pol,
                           const EvalParams& params, const timebase::LeapTable& table);

// Evaluates every policy in `space`, recording per-policy errors instead of
// aborting, and classifies per-week stability. Policy evaluations are
// independent pure computations; `parallel` runs them concurrently with
// order-insensitive assembly.
InterpretationReport evaluate_all(const activity::Timeline& t,
                                  const std::vector<InterpretationPolicy>& space,
                                  const EvalParams& params, const timebase::LeapTable& table,
                                  bool parallel = false);

// {StartWeek, EndWeek, SplitAtBoundary} x {IgnoreLeap, FoldLeap} x
// {CountEdges, StrictArt4k}, weekly_rest_gap = EmitFlagged: 12 policies.
// BestCase/WorstCase are bounds, run separately when wanted.
std::vector<InterpretationPolicy> default_policy_space();

const char* attribution_label(AttributionRule r);
const char* leap_label(timebase::LeapPolicy p);
const char* edge_label(segmentation::EdgePolicy e);
const char* weekly_rest_gap_label(WeeklyRestGap g);
const char* stability_label(Stability s);
AttributionRule attribution_from_label(std::string_view s);
timebase::LeapPolicy leap_from_label(std::string_view s);
segmentation::EdgePolicy edge_from_label(std::string_view s);
WeeklyRestGap weekly_rest_gap_from_label(std::string_view s);

std::string to_json_string(const InterpretationReport& report);

}  // namespace dtc::interpretation
