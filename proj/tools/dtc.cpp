// dtc — checks driver activity timelines for compliance with Article 6.1 of
// Regulation (EC) No 561/2006, across every admissible interpretation of the
// text, and emits motivated, replayable decision documents.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dtc/activity.hpp"
#include "dtc/decision.hpp"
#include "dtc/interpretation.hpp"
#include "dtc/specdsl.hpp"
#include "dtc/version.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitCompliant = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUnstable = 2;
constexpr int kExitUsage = 64;
constexpr int kExitDataError = 65;

struct CommonOpts {
  std::string input;
  std::string format = "csv";
  std::string config_path;
  std::string leap_table_path;
  std::string provisions_path;
  std::string attribution;
  std::string leap;
  std::string edge;
  std::string weekly_rest_gap;
  std::int64_t daily_rest_min = -1;
  std::int64_t weekly_rest_min = -1;
  std::int64_t daily_limit_min = -1;
  std::int64_t extended_limit_min = -1;
  int max_extensions = -1;
  int weekly_dp_max_len = -1;
};

struct Resolved {
  dtc::interpretation::EvalParams params;
  dtc::interpretation::InterpretationPolicy policy;
  std::vector<dtc::interpretation::InterpretationPolicy> space;
  dtc::timebase::LeapTable table;
  std::string provisions_path = "data/provisions_561_2006.txt";
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dtc::Error("FileNotFound", "cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<dtc::interpretation::InterpretationPolicy> space_from_config(
    const ordered_json& axes) {
  std::vector<dtc::interpretation::InterpretationPolicy> space;
  const auto list = [&](const char* key, std::vector<std::string> fallback) {
    if (!axes.contains(key)) return fallback;
    return axes.at(key).get<std::vector<std::string>>();
  };
  for (const std::string& a : list("attribution", {"start_week", "end_week", "split_at_boundary"})) {
    for (const std::string& l : list("leap", {"ignore_leap", "fold_leap"})) {
      for (const std::string& e : list("edge", {"count_edges", "strict_art4k"})) {
        for (const std::string& g : list("weekly_rest_gap", {"emit_flagged"})) {
          space.push_back({dtc::interpretation::attribution_from_label(a),
                           dtc::interpretation::leap_from_label(l),
                           dtc::interpretation::edge_from_label(e),
                           dtc::interpretation::weekly_rest_gap_from_label(g)});
        }
      }
    }
  }
  return space;
}

// Precedence: built-in defaults, then the config file, then flags.
Resolved resolve(const CommonOpts& o) {
  Resolved r;
  r.policy = {dtc::interpretation::AttributionRule::StartWeek,
              dtc::timebase::LeapPolicy::FoldLeap,
              dtc::segmentation::EdgePolicy::CountEdges,
              dtc::interpretation::WeeklyRestGap::EmitFlagged};
  r.space = dtc::interpretation::default_policy_space();

  std::string leap_table_path;
  if (!o.config_path.empty()) {
    ordered_json cfg;
    try {
      cfg = ordered_json::parse(read_file(o.config_path));
    } catch (const nlohmann::json::exception& e) {
      throw dtc::Error("BadConfig", std::string("config: ") + e.what());
    }
    try {
      if (cfg.contains("rest_params")) {
        const auto& rp = cfg.at("rest_params");
        if (rp.contains("daily_rest_min"))
          r.params.rest.daily_rest_min =
              dtc::timebase::DurationMin(rp.at("daily_rest_min").get<std::int64_t>());
        if (rp.contains("weekly_rest_min"))
          r.params.rest.weekly_rest_min =
              dtc::timebase::DurationMin(rp.at("weekly_rest_min").get<std::int64_t>());
      }
      if (cfg.contains("article6_params")) {
        const auto& ap = cfg.at("article6_params");
        if (ap.contains("daily_limit_min"))
          r.params.article6.daily_limit =
              dtc::timebase::DurationMin(ap.at("daily_limit_min").get<std::int64_t>());
        if (ap.contains("extended_limit_min"))
          r.params.article6.extended_limit =
              dtc::timebase::DurationMin(ap.at("extended_limit_min").get<std::int64_t>());
        if (ap.contains("max_extensions"))
          r.params.article6.max_extensions = ap.at("max_extensions").get<int>();
        if (ap.contains("weekly_dp_max_len"))
          r.params.article6.weekly_dp_max_len = ap.at("weekly_dp_max_len").get<int>();
      }
      if (cfg.contains("leap_table")) leap_table_path = cfg.at("leap_table").get<std::string>();
      if (cfg.contains("provisions")) r.provisions_path = cfg.at("provisions").get<std::string>();
      if (cfg.contains("policy")) {
        const auto& p = cfg.at("policy");
        if (p.contains("attribution"))
          r.policy.attribution =
              dtc::interpretation::attribution_from_label(p.at("attribution").get<std::string>());
        if (p.contains("leap"))
          r.policy.leap = dtc::interpretation::leap_from_label(p.at("leap").get<std::string>());
        if (p.contains("edge"))
          r.policy.edge = dtc::interpretation::edge_from_label(p.at("edge").get<std::string>());
        if (p.contains("weekly_rest_gap"))
          r.policy.weekly_rest_gap = dtc::interpretation::weekly_rest_gap_from_label(
              p.at("weekly_rest_gap").get<std::string>());
      }
      if (cfg.contains("policy_space")) r.space = space_from_config(cfg.at("policy_space"));
    } catch (const nlohmann::json::exception& e) {
      throw dtc::Error("BadConfig", std::string("config: ") + e.what());
    }
  }

  if (!o.attribution.empty())
    r.policy.attribution = dtc::interpretation::attribution_from_label(o.attribution);
  if (!o.leap.empty()) r.policy.leap = dtc::interpretation::leap_from_label(o.leap);
  if (!o.edge.empty()) r.policy.edge = dtc::interpretation::edge_from_label(o.edge);
  if (!o.weekly_rest_gap.empty())
    r.policy.weekly_rest_gap =
        dtc::interpretation::weekly_rest_gap_from_label(o.weekly_rest_gap);
  if (o.daily_rest_min >= 0)
    r.params.rest.daily_rest_min = dtc::timebase::DurationMin(o.daily_rest_min);
  if (o.weekly_rest_min >= 0)
    r.params.rest.weekly_rest_min = dtc::timebase::DurationMin(o.weekly_rest_min);
  if (o.daily_limit_min >= 0)
    r.params.article6.daily_limit = dtc::timebase::DurationMin(o.daily_limit_min);
  if (o.extended_limit_min >= 0)
    r.params.article6.extended_limit = dtc::timebase::DurationMin(o.extended_limit_min);
  if (o.max_extensions >= 0) r.params.article6.max_extensions = o.max_extensions;
  if (o.weekly_dp_max_len >= 0) r.params.article6.weekly_dp_max_len = o.weekly_dp_max_len;
  if (!o.leap_table_path.empty()) leap_table_path = o.leap_table_path;
  if (!o.provisions_path.empty()) r.provisions_path = o.provisions_path;

  r.params.rest.validate();
  r.params.article6.validate();
  if (!leap_table_path.empty()) r.table = dtc::timebase::LeapTable::load(leap_table_path);
  return r;
}

dtc::activity::Timeline load_input(const CommonOpts& o, const Resolved& r) {
  if (o.format != "csv" && o.format != "jsonl") {
    throw dtc::Error("BadFormat", "format must be csv or jsonl");
  }
  const auto format =
      o.format == "csv" ? dtc::activity::LogFormat::Csv : dtc::activity::LogFormat::Jsonl;
  dtc::activity::Timeline t = dtc::activity::load_timeline(o.input, format);
  dtc::activity::validate_leap_flags(t, r.table);
  for (const dtc::activity::ActivityRecord& rec : t.records()) {
    if (!r.table.covers(rec.start) || !r.table.covers(rec.end)) {
      std::cerr << "dtc: warning: activity extends past the leap table's announced era;"
                   " treating the table as empty there\n";
      break;
    }
  }
  return t;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_input = true) {
  auto* input = cmd->add_option("--input,-i", o.input, "activity log file");
  if (needs_input) input->required();
  cmd->add_option("--format", o.format, "input format: csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  cmd->add_option("--config,-c", o.config_path, "JSON configuration file");
  cmd->add_option("--leap-table", o.leap_table_path, "leap second table file");
  cmd->add_option("--provisions", o.provisions_path, "provision texts file");
  cmd->add_option("--attribution", o.attribution, "week attribution rule")
      ->check(CLI::IsMember(
          {"start_week", "end_week", "split_at_boundary", "best_case", "worst_case"}));
  cmd->add_option("--leap", o.leap, "leap second policy")
      ->check(CLI::IsMember({"ignore_leap", "fold_leap", "strict_literal"}));
  cmd->add_option("--edge", o.edge, "timeline edge policy")
      ->check(CLI::IsMember({"count_edges", "strict_art4k"}));
  cmd->add_option("--weekly-rest-gap", o.weekly_rest_gap,
                  "periods between two weekly rests: emit_flagged or suppress")
      ->check(CLI::IsMember({"emit_flagged", "suppress"}));
  cmd->add_option("--daily-rest-min", o.daily_rest_min, "qualifying daily rest, minutes");
  cmd->add_option("--weekly-rest-min", o.weekly_rest_min, "qualifying weekly rest, minutes");
  cmd->add_option("--daily-limit-min", o.daily_limit_min, "daily driving limit, minutes");
  cmd->add_option("--extended-limit-min", o.extended_limit_min, "extended limit, minutes");
  cmd->add_option("--max-extensions", o.max_extensions, "extensions allowed per week");
  cmd->add_option("--weekly-dp-max-len", o.weekly_dp_max_len,
                  "maximum entries in a weekly pattern");
}

std::vector<dtc::interpretation::InterpretationPolicy> space_with(
    std::vector<dtc::interpretation::InterpretationPolicy> space,
    const dtc::interpretation::InterpretationPolicy& chosen) {
  if (std::find(space.begin(), space.end(), chosen) == space.end()) space.push_back(chosen);
  return space;
}

int exit_from_verdicts(const dtc::interpretation::VerdictMap& verdicts) {
  for (const auto& [week, ok] : verdicts) {
    if (!ok) return kExitViolation;
  }
  return kExitCompliant;
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------
int run_check(const CommonOpts& o, bool all_policies, bool strict_stability, bool parallel,
              bool text) {
  const Resolved r = resolve(o);
  const dtc::activity::Timeline t = load_input(o, r);

  if (all_policies) {
    const auto space = space_with(r.space, r.policy);
    const auto report =
        dtc::interpretation::evaluate_all(t, space, r.params, r.table, parallel);
    std::cout << dtc::interpretation::to_json_string(report) << "\n";
    if (strict_stability) {
      for (const auto& [week, s] : report.stability) {
        if (s == dtc::interpretation::Stability::InterpretationDependent) return kExitUnstable;
      }
    }
    for (const auto& outcome : report.per_policy) {
      if (outcome.policy == r.policy) {
        if (outcome.error) throw dtc::Error("PolicyFailed", *outcome.error);
        return exit_from_verdicts(outcome.verdicts);
      }
    }
    return kExitCompliant;
  }

  const auto report = dtc::interpretation::evaluate_all(t, {r.policy}, r.params, r.table);
  if (report.per_policy.front().error) {
    throw dtc::Error("PolicyFailed", *report.per_policy.front().error);
  }
  const auto provisions = dtc::decision::ProvisionsLibrary::load(r.provisions_path);
  const auto docs = dtc::decision::motivate(t, report, r.policy, r.params, r.table, provisions);
  if (text) {
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (i) std::cout << "\n";
      std::cout << dtc::decision::render(docs[i], dtc::decision::RenderMode::Text);
    }
  } else {
    ordered_json arr = ordered_json::array();
    for (const auto& doc : docs) {
      arr.push_back(ordered_json::parse(dtc::decision::render(doc, dtc::decision::RenderMode::Json)));
    }
    std::cout << arr.dump(2) << "\n";
  }
  return exit_from_verdicts(report.per_policy.front().verdicts);
}

// ---------------------------------------------------------------------------
// segment
// ---------------------------------------------------------------------------
int run_segment(const CommonOpts& o) {
  const Resolved r = resolve(o);
  const dtc::activity::Timeline t = load_input(o, r);
  const auto ddps = dtc::segmentation::daily_driving_periods(t, r.params.rest, r.table,
                                                             r.policy.leap, r.policy.edge);
  std::cout << dtc::segmentation::to_json_string(ddps) << "\n";
  return kExitCompliant;
}

// ---------------------------------------------------------------------------
// enumerate
// ---------------------------------------------------------------------------
int run_enumerate(const CommonOpts& o) {
  const Resolved r = resolve(o);
  const dtc::activity::Timeline t = load_input(o, r);
  const auto ddps = dtc::segmentation::daily_driving_periods(t, r.params.rest, r.table,
                                                             r.policy.leap, r.policy.edge);
  const auto spanning = dtc::interpretation::spanning_ddp_indices(ddps, r.table, r.policy.leap);
  const auto assignments = dtc::interpretation::enumerate_attributions(spanning.size());

  ordered_json out;
  out["spanning_ddps"] = spanning;
  out["assignment_count"] = assignments.size();
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    const auto patterns = dtc::interpretation::patterns_for_assignment(ddps, assignments[i],
                                                                       r.table, r.policy.leap);
    ordered_json entry;
    entry["id"] = i;
    entry["to_end_week"] = assignments[i];
    ordered_json verdicts = ordered_json::object();
    for (const auto& p : patterns) {
      verdicts[p.week.str()] = dtc::article6::check_article6_1(p, r.params.article6);
    }
    entry["verdicts"] = std::move(verdicts);
    arr.push_back(std::move(entry));
  }
  out["assignments"] = std::move(arr);
  std::cout << out.dump(2) << "\n";
  return kExitCompliant;
}

// ---------------------------------------------------------------------------
// explain
// ---------------------------------------------------------------------------
int run_explain(const CommonOpts& o, const std::string& week_filter, bool json, bool parallel) {
  const Resolved r = resolve(o);
  const dtc::activity::Timeline t = load_input(o, r);
  const auto space = space_with(r.space, r.policy);
  const auto report = dtc::interpretation::evaluate_all(t, space, r.params, r.table, parallel);
  const auto provisions = dtc::decision::ProvisionsLibrary::load(r.provisions_path);
  auto docs = dtc::decision::motivate(t, report, r.policy, r.params, r.table, provisions);

  if (!week_filter.empty()) {
    const auto week = dtc::timebase::WeekId::parse(week_filter);
    std::erase_if(docs, [&](const auto& d) { return d.week != week; });
  }
  for (const auto& doc : docs) {
    // Every emitted document must replay from its own citations.
    if (!dtc::decision::replay(doc, t, r.params, r.table)) {
      throw dtc::Error("ReplayFailed", "document for " + doc.week.str() +
                                           " is not reproducible from its cited facts");
    }
  }
  if (json) {
    ordered_json arr = ordered_json::array();
    for (const auto& doc : docs) {
      arr.push_back(ordered_json::parse(dtc::decision::render(doc, dtc::decision::RenderMode::Json)));
    }
    std::cout << arr.dump(2) << "\n";
  } else {
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (i) std::cout << "\n";
      std::cout << dtc::decision::render(docs[i], dtc::decision::RenderMode::Text);
    }
  }
  return kExitCompliant;
}

// ---------------------------------------------------------------------------
// spec
// ---------------------------------------------------------------------------
std::vector<dtc::article6::WeeklyDrivingPattern> random_patterns(std::size_t n,
                                                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len_dist(0, 8);
  std::uniform_int_distribution<int> min_dist(0, 900);
  const dtc::timebase::WeekId week{2024, 1};
  std::vector<dtc::article6::WeeklyDrivingPattern> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    dtc::article6::WeeklyDrivingPattern w;
    w.week = week;
    const int len = len_dist(rng);
    for (int j = 0; j < len; ++j) {
      w.daily_driving.push_back(dtc::timebase::DurationMin(min_dist(rng)));
      w.provenance.push_back({static_cast<std::size_t>(j), week});
    }
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<dtc::article6::WeeklyDrivingPattern> exhaustive_patterns() {
  const std::int64_t values[] = {0, 540, 541, 600, 601};
  const dtc::timebase::WeekId week{2024, 1};
  std::vector<dtc::article6::WeeklyDrivingPattern> out;
  for (int len = 0; len <= 3; ++len) {
    std::vector<int> idx(len, 0);
    while (true) {
      dtc::article6::WeeklyDrivingPattern w;
      w.week = week;
      for (int j = 0; j < len; ++j) {
        w.daily_driving.push_back(dtc::timebase::DurationMin(values[idx[j]]));
        w.provenance.push_back({static_cast<std::size_t>(j), week});
      }
      out.push_back(std::move(w));
      int k = len - 1;
      while (k >= 0 && idx[k] == 4) {
        idx[k] = 0;
        --k;
      }
      if (k < 0) break;
      ++idx[k];
    }
  }
  return out;
}

int run_spec(const CommonOpts& o, const std::string& action, const std::string& spec_path,
             const std::string& entry, const std::string& week_pattern, std::size_t samples,
             std::uint64_t seed) {
  const Resolved r = resolve(o);
  const auto program = dtc::specdsl::load_spec(spec_path);

  if (action == "parse") {
    std::cout << dtc::specdsl::print_program(program);
    return kExitCompliant;
  }

  dtc::specdsl::typecheck(program);
  if (action == "typecheck") {
    std::cout << "typecheck: ok (" << program.definitions.size() << " definition"
              << (program.definitions.size() == 1 ? "" : "s") << ")\n";
    return kExitCompliant;
  }

  if (action == "eval") {
    ordered_json pat;
    try {
      pat = ordered_json::parse(week_pattern);
    } catch (const nlohmann::json::exception& e) {
      throw dtc::Error("BadWeekPattern", e.what());
    }
    dtc::article6::WeeklyDrivingPattern w;
    w.week = dtc::timebase::WeekId::parse(pat.at("week").get<std::string>());
    for (std::int64_t m : pat.at("daily_driving_min").get<std::vector<std::int64_t>>()) {
      w.provenance.push_back({w.daily_driving.size(), w.week});
      w.daily_driving.push_back(dtc::timebase::DurationMin(m));
    }
    const dtc::specdsl::Evaluator evaluator(program, r.params.article6);
    const bool verdict = evaluator.eval_pattern(entry, w);
    ordered_json out;
    out["entry"] = entry;
    out["week"] = w.week.str();
    out["verdict"] = verdict;
    std::cout << out.dump(2) << "\n";
    return kExitCompliant;
  }

  if (action == "diff") {
    auto all = exhaustive_patterns();
    const auto rnd = random_patterns(samples, seed);
    all.insert(all.end(), rnd.begin(), rnd.end());
    const auto report = dtc::specdsl::differential_check(program, all, r.params.article6);
    ordered_json out;
    out["samples"] = report.samples;
    ordered_json disagreements = ordered_json::array();
    for (const auto& d : report.disagreements) {
      ordered_json e;
      ordered_json values = ordered_json::array();
      for (const auto& m : d.pattern.daily_driving) values.push_back(m.minutes());
      e["daily_driving_min"] = std::move(values);
      e["native"] = d.native_verdict;
      e["spec"] = d.spec_verdict;
      disagreements.push_back(std::move(e));
    }
    out["disagreements"] = std::move(disagreements);
    std::cout << out.dump(2) << "\n";
    return report.agreed() ? kExitCompliant : kExitViolation;
  }

  throw dtc::Error("BadSpecAction", "unknown spec action: " + action);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driving time compliance checker (Regulation (EC) No 561/2006, Article 6.1)"};
  app.set_version_flag("--version", std::string(dtc::kToolVersion));
  app.require_subcommand(1);

  CommonOpts check_opts;
  bool all_policies = false, strict_stability = false, parallel = false, text = false;
  auto* check = app.add_subcommand("check", "evaluate per-week verdicts");
  add_common(check, check_opts);
  check->add_flag("--all-policies", all_policies,
                  "evaluate the whole policy space and print the interpretation report");
  check->add_flag("--strict-stability", strict_stability,
                  "exit 2 when any week is interpretation dependent");
  check->add_flag("--parallel", parallel, "evaluate policies concurrently");
  check->add_flag("--text", text, "citizen-readable rendering instead of JSON");

  CommonOpts segment_opts;
  auto* segment = app.add_subcommand("segment", "print daily driving periods");
  add_common(segment, segment_opts);

  CommonOpts enumerate_opts;
  auto* enumerate = app.add_subcommand(
      "enumerate", "what-if: verdicts under every attribution of boundary-spanning periods");
  add_common(enumerate, enumerate_opts);

  CommonOpts explain_opts;
  std::string week_filter;
  bool explain_json = false, explain_parallel = false;
  auto* explain = app.add_subcommand("explain", "emit motivated decision documents");
  add_common(explain, explain_opts);
  explain->add_option("--week", week_filter, "restrict to one ISO week, e.g. 2024-W02");
  explain->add_flag("--json", explain_json, "JSON documents instead of text");
  explain->add_flag("--parallel", explain_parallel, "evaluate policies concurrently");

  CommonOpts spec_opts;
  std::string spec_path, entry = "article6_1", week_pattern;
  std::size_t samples = 10000;
  std::uint64_t seed = 42;
  auto* spec = app.add_subcommand("spec", "specification language tooling");
  spec->fallthrough();
  add_common(spec, spec_opts, /*needs_input=*/false);
  spec->add_option("--spec", spec_path, "specification source file")->required();
  spec->add_option("--entry", entry, "definition to evaluate");
  spec->add_option("--week-pattern", week_pattern,
                   R"(JSON pattern, e.g. {"week":"2024-W01","daily_driving_min":[540,600]})");
  spec->add_option("--samples", samples, "random samples for diff");
  spec->add_option("--seed", seed, "random seed for diff");
  auto* spec_parse = spec->add_subcommand("parse", "parse and print fully parenthesized form");
  auto* spec_typecheck = spec->add_subcommand("typecheck", "type-check the program");
  auto* spec_eval = spec->add_subcommand("eval", "evaluate an entry on a week pattern");
  auto* spec_diff = spec->add_subcommand("diff", "differential check against the native checker");
  spec->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "dtc: error: Usage: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*check) {
      return run_check(check_opts, all_policies, strict_stability, parallel, text);
    }
    if (*segment) return run_segment(segment_opts);
    if (*enumerate) return run_enumerate(enumerate_opts);
    if (*explain) {
      return run_explain(explain_opts, week_filter, explain_json, explain_parallel);
    }
    if (*spec) {
      std::string action;
      if (*spec_parse) action = "parse";
      if (*spec_typecheck) action = "typecheck";
      if (*spec_eval) action = "eval";
      if (*spec_diff) action = "diff";
      return run_spec(spec_opts, action, spec_path, entry, week_pattern, samples, seed);
    }
  } catch (const dtc::Error& e) {
    std::cerr << "dtc: error: " << e.code() << ": " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "dtc: error: Internal: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitUsage;
}
