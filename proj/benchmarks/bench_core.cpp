#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "dtc/activity.hpp"
#include "dtc/interpretation.hpp"
#include "dtc/specdsl.hpp"

namespace {

using namespace dtc;
using activity::ActivityKind;
using activity::ActivityRecord;
using activity::Timeline;
using timebase::Instant;

const char* kSpecText =
    "Definition article6_1 (w : list time) : bool :=\n"
    "  is_weeklyDP w ==> all is_leq_10 w && count is_gt_9 w <= 2.\n";

article6::WeeklyDrivingPattern sample_pattern() {
  article6::WeeklyDrivingPattern w;
  w.week = {2024, 2};
  for (std::int64_t m : {480, 540, 600, 300, 541, 240, 600}) {
    w.provenance.push_back({w.daily_driving.size(), w.week});
    w.daily_driving.push_back(timebase::DurationMin(m));
  }
  return w;
}

// weeks of rest/drive days; every week ends with a drive crossing into Monday.
Timeline synthetic_weeks(int weeks, bool spanning) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> minutes(300, 640);
  std::vector<ActivityRecord> records;
  std::int64_t cursor = timebase::make_instant(2024, 1, 1, 0, 0, 0).posix_seconds;
  for (int w = 0; w < weeks; ++w) {
    const std::int64_t week_end = cursor + 604800 - (cursor - 1704067200) % 604800;
    for (int d = 0; d < 4; ++d) {
      const std::int64_t rest_end = cursor + 660 * 60;
      const std::int64_t drive_end = rest_end + minutes(rng) * 60;
      records.push_back({Instant{cursor, false}, Instant{rest_end, false}, ActivityKind::Rest,
                         activity::RecordSource::Automatic});
      records.push_back({Instant{rest_end, false}, Instant{drive_end, false},
                         ActivityKind::Driving, activity::RecordSource::Automatic});
      cursor = drive_end;
    }
    if (spanning) {
      const std::int64_t evening = week_end - 4 * 3600;
      const std::int64_t drive_end = evening + minutes(rng) * 60;
      records.push_back({Instant{cursor, false}, Instant{evening, false}, ActivityKind::Rest,
                         activity::RecordSource::Automatic});
      records.push_back({Instant{evening, false}, Instant{drive_end, false},
                         ActivityKind::Driving, activity::RecordSource::Automatic});
      cursor = drive_end;
    } else {
      records.push_back({Instant{cursor, false}, Instant{week_end, false}, ActivityKind::Rest,
                         activity::RecordSource::Automatic});
      cursor = week_end;
    }
  }
  return Timeline::validated("B1", std::move(records));
}

void BM_CheckArticle6(benchmark::State& state) {
  const auto pattern = sample_pattern();
  const article6::Article6Params params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(article6::check_article6_1(pattern, params));
  }
}
BENCHMARK(BM_CheckArticle6);

void BM_SpecParse(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(specdsl::parse_spec(kSpecText));
  }
}
BENCHMARK(BM_SpecParse);

void BM_SpecEval(benchmark::State& state) {
  const specdsl::Evaluator evaluator(specdsl::parse_spec(kSpecText), article6::Article6Params{});
  const auto pattern = sample_pattern();
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluator.eval_pattern("article6_1", pattern));
  }
}
BENCHMARK(BM_SpecEval);

void BM_ParseTimelineCsv(benchmark::State& state) {
  const std::string csv =
      activity::serialize_timeline(synthetic_weeks(static_cast<int>(state.range(0)), true),
                                   activity::LogFormat::Csv);
  for (auto _ : state) {
    benchmark::DoNotOptimize(activity::parse_timeline(csv, activity::LogFormat::Csv));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(csv.size()));
}
BENCHMARK(BM_ParseTimelineCsv)->Arg(4)->Arg(26)->Arg(52);

void BM_SegmentTimeline(benchmark::State& state) {
  const Timeline t = synthetic_weeks(static_cast<int>(state.range(0)), true);
  const timebase::LeapTable table;
  for (auto _ : state) {
    benchmark::DoNotOptimize(segmentation::daily_driving_periods(
        t, segmentation::RestParams{}, table, timebase::LeapPolicy::FoldLeap,
        segmentation::EdgePolicy::CountEdges));
  }
}
BENCHMARK(BM_SegmentTimeline)->Arg(4)->Arg(52);

void BM_EvaluatePolicySpace(benchmark::State& state) {
  const Timeline t = synthetic_weeks(4, true);
  const timebase::LeapTable table;
  const interpretation::EvalParams params;
  const auto space = interpretation::default_policy_space();
  for (auto _ : state) {
    benchmark::DoNotOptimize(interpretation::evaluate_all(t, space, params, table));
  }
}
BENCHMARK(BM_EvaluatePolicySpace);

void BM_BestCaseBound(benchmark::State& state) {
  // One spanning period per week: 2^k assignments for k = range(0).
  const Timeline t = synthetic_weeks(static_cast<int>(state.range(0)), true);
  const timebase::LeapTable table;
  const interpretation::EvalParams params;
  const interpretation::InterpretationPolicy best{
      interpretation::AttributionRule::BestCase, timebase::LeapPolicy::FoldLeap,
      segmentation::EdgePolicy::CountEdges, interpretation::WeeklyRestGap::EmitFlagged};
  for (auto _ : state) {
    benchmark::DoNotOptimize(interpretation::evaluate_policy(t, best, params, table));
  }
}
BENCHMARK(BM_BestCaseBound)->DenseRange(2, 10, 4);

}  // namespace

BENCHMARK_MAIN();
