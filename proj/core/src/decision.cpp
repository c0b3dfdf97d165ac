#include "dtc/decision.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dtc/version.hpp"

namespace dtc::decision {

namespace {

using interpretation::AttributionRule;
using interpretation::InterpretationPolicy;
using interpretation::Stability;
using timebase::DurationMin;
using timebase::Instant;
using timebase::Span;

std::string hmm(DurationMin d) {
  const std::int64_t h = d.minutes() / 60;
  const std::int64_t m = d.minutes() % 60;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld:%02lld", static_cast<long long>(h),
                static_cast<long long>(m));
  return buf;
}

nlohmann::ordered_json policy_to_json(const InterpretationPolicy& p) {
  return {{"attribution", interpretation::attribution_label(p.attribution)},
          {"leap", interpretation::leap_label(p.leap)},
          {"edge", interpretation::edge_label(p.edge)},
          {"weekly_rest_gap", interpretation::weekly_rest_gap_label(p.weekly_rest_gap)}};
}

InterpretationPolicy policy_from_json(const nlohmann::ordered_json& j) {
  InterpretationPolicy p;
  p.attribution = interpretation::attribution_from_label(j.at("attribution").get<std::string>());
  p.leap = interpretation::leap_from_label(j.at("leap").get<std::string>());
  p.edge = interpretation::edge_from_label(j.at("edge").get<std::string>());
  p.weekly_rest_gap =
      interpretation::weekly_rest_gap_from_label(j.at("weekly_rest_gap").get<std::string>());
  return p;
}

// Fact span: split fragments cover only their week's slice of the period;
// every other rule attributes the whole period span.
Span fact_span(const segmentation::DailyDrivingPeriod& ddp, timebase::WeekId week,
               AttributionRule rule, const timebase::LeapTable& table,
               timebase::LeapPolicy leap) {
  if (rule != AttributionRule::SplitAtBoundary) return ddp.span;
  const Span bounds = timebase::week_bounds(week, table, leap);
  return {std::max(ddp.span.first, bounds.first), std::min(ddp.span.second, bounds.second)};
}

}  // namespace

ProvisionsLibrary ProvisionsLibrary::parse(std::string_view text) {
  ProvisionsLibrary lib;
  LegalGround current;
  bool in_block = false;
  std::string body;

  auto flush = [&] {
    if (!in_block) return;
    while (!body.empty() && (body.back() == '\n' || body.back() == ' ')) body.pop_back();
    current.quoted_text = body;
    if (current.instrument.empty() || current.article.empty() || current.quoted_text.empty()) {
      throw Error("ProvisionsSyntax", "provision block with empty fields");
    }
    lib.grounds_.push_back(current);
    body.clear();
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (!line.empty() && line.front() == '[') {
      if (line.back() != ']') throw Error("ProvisionsSyntax", "unterminated block header");
      flush();
      std::string_view header = line.substr(1, line.size() - 2);
      const std::size_t sep = header.find(" | ");
      if (sep == std::string_view::npos) {
        throw Error("ProvisionsSyntax", "block header must be '[instrument | article]'");
      }
      current = LegalGround{std::string(header.substr(0, sep)),
                            std::string(header.substr(sep + 3)), ""};
      in_block = true;
      continue;
    }
    if (!in_block) {
      if (line.empty() || line.front() == '#') continue;
      throw Error("ProvisionsSyntax", "text outside any provision block");
    }
    if (!body.empty()) body += '\n';
    body += std::string(line);
  }
  flush();
  return lib;
}

ProvisionsLibrary ProvisionsLibrary::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("FileNotFound", "cannot open provisions file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const LegalGround* ProvisionsLibrary::find(std::string_view article) const {
  for (const LegalGround& g : grounds_) {
    if (g.article == article) return &g;
  }
  return nullptr;
}

std::vector<LegalGround> ProvisionsLibrary::grounds_for_verdict() const {
  std::vector<LegalGround> out;
  for (const char* article : {"Article 6.1", "Article 4(i)", "Article 4(j)", "Article 4(k)"}) {
    const LegalGround* g = find(article);
    if (!g) throw Error("MissingProvision", std::string("provisions file lacks ") + article);
    out.push_back(*g);
  }
  return out;
}

std::vector<DecisionDocument> motivate(const activity::Timeline& t,
                                       const interpretation::InterpretationReport& report,
                                       const InterpretationPolicy& chosen,
                                       const interpretation::EvalParams& params,
                                       const timebase::LeapTable& table,
                                       const ProvisionsLibrary& provisions) {
  const interpretation::PolicyOutcome* outcome = nullptr;
  for (const interpretation::PolicyOutcome& o : report.per_policy) {
    if (o.policy == chosen) {
      outcome = &o;
      break;
    }
  }
  if (!outcome || outcome->error) throw PolicyNotEvaluated(chosen.summary());

  const auto attribution = interpretation::attributed_patterns(t, chosen, params, table);
  const std::vector<LegalGround> grounds = provisions.grounds_for_verdict();

  std::vector<DecisionDocument> docs;
  for (const article6::WeeklyDrivingPattern& pattern : attribution.patterns) {
    DecisionDocument doc;
    doc.driver_id = t.driver_id();
    doc.week = pattern.week;
    doc.verdict = article6::check_article6_1(pattern, params.article6);
    doc.policy = chosen;
    doc.grounds = grounds;
    doc.params = params;
    doc.tool_version = std::string(kToolVersion);

    if (auto it = report.stability.find(pattern.week); it != report.stability.end()) {
      doc.stability = it->second;
    } else {
      doc.stability = doc.verdict ? Stability::StableCompliant : Stability::StableViolation;
    }
    if (doc.stability == Stability::InterpretationDependent) {
      for (const interpretation::PolicyOutcome& o : report.per_policy) {
        if (o.error || o.policy == chosen) continue;
        const auto it = o.verdicts.find(pattern.week);
        const bool verdict_there = it == o.verdicts.end() ? true : it->second;
        if (verdict_there != doc.verdict) doc.dissenting.push_back(o.policy);
      }
    }

    for (std::size_t i = 0; i < pattern.daily_driving.size(); ++i) {
      const article6::DdpRef& ref = pattern.provenance[i];
      const segmentation::DailyDrivingPeriod& ddp = attribution.ddps[ref.ddp_index];
      FactTraceEntry fact;
      fact.ddp_index = ref.ddp_index;
      fact.span = fact_span(ddp, pattern.week, chosen.attribution, table, chosen.leap);
      fact.driving = pattern.daily_driving[i];
      for (const segmentation::DrivingSlice& s : ddp.slices) {
        const Instant lo = std::max(s.span.first, fact.span.first);
        const Instant hi = std::min(s.span.second, fact.span.second);
        if (lo < hi) fact.record_indices.push_back(s.record_index);
      }
      fact.week = pattern.week;
      fact.rule = chosen.attribution;
      doc.facts.push_back(std::move(fact));
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

bool replay(const DecisionDocument& doc, const activity::Timeline& t,
            const interpretation::EvalParams& params, const timebase::LeapTable& table) {
  article6::WeeklyDrivingPattern pattern;
  pattern.week = doc.week;

  for (std::size_t i = 0; i < doc.facts.size(); ++i) {
    const FactTraceEntry& fact = doc.facts[i];
    std::int64_t minutes = 0;
    for (std::size_t idx : fact.record_indices) {
      if (idx >= t.records().size()) throw DanglingReference(idx);
      const activity::ActivityRecord& r = t.records()[idx];
      if (r.kind != activity::ActivityKind::Driving) continue;
      const Instant lo = std::max(r.start, fact.span.first);
      const Instant hi = std::min(r.end, fact.span.second);
      if (lo < hi) {
        minutes += timebase::duration_between(lo, hi, table, doc.policy.leap).minutes();
      }
    }
    if (minutes != fact.driving.minutes()) throw FactMismatch(i);
    pattern.daily_driving.push_back(fact.driving);
    pattern.provenance.push_back(article6::DdpRef{fact.ddp_index, doc.week});
  }

  return article6::check_article6_1(pattern, params.article6) == doc.verdict;
}

std::string render(const DecisionDocument& doc, RenderMode mode) {
  if (mode == RenderMode::Json) {
    nlohmann::ordered_json j;
    j["driver_id"] = doc.driver_id;
    j["week"] = doc.week.str();
    j["verdict"] = doc.verdict;
    j["stability"] = interpretation::stability_label(doc.stability);
    j["policy"] = policy_to_json(doc.policy);
    nlohmann::ordered_json dissenting = nlohmann::ordered_json::array();
    for (const InterpretationPolicy& p : doc.dissenting) dissenting.push_back(policy_to_json(p));
    j["dissenting_policies"] = std::move(dissenting);
    nlohmann::ordered_json grounds = nlohmann::ordered_json::array();
    for (const LegalGround& g : doc.grounds) {
      grounds.push_back({{"instrument", g.instrument},
                         {"article", g.article},
                         {"quoted_text", g.quoted_text}});
    }
    j["grounds"] = std::move(grounds);
    nlohmann::ordered_json facts = nlohmann::ordered_json::array();
    for (const FactTraceEntry& f : doc.facts) {
      facts.push_back({{"ddp_index", f.ddp_index},
                       {"span", {{"start", timebase::format_instant(f.span.first)},
                                 {"end", timebase::format_instant(f.span.second)}}},
                       {"driving_min", f.driving.minutes()},
                       {"record_indices", f.record_indices},
                       {"week", f.week.str()},
                       {"rule", interpretation::attribution_label(f.rule)}});
    }
    j["facts"] = std::move(facts);
    j["params"] = {{"rest",
                    {{"daily_rest_min", doc.params.rest.daily_rest_min.minutes()},
                     {"weekly_rest_min", doc.params.rest.weekly_rest_min.minutes()}}},
                   {"article6",
                    {{"daily_limit_min", doc.params.article6.daily_limit.minutes()},
                     {"extended_limit_min", doc.params.article6.extended_limit.minutes()},
                     {"max_extensions", doc.params.article6.max_extensions},
                     {"weekly_dp_max_len", doc.params.article6.weekly_dp_max_len}}}};
    j["tool_version"] = doc.tool_version;
    return j.dump(2) + "\n";
  }

  std::ostringstream out;
  out << "Decision for driver " << doc.driver_id << ", week " << doc.week.str() << ": "
      << (doc.verdict ? "COMPLIANT" : "NOT COMPLIANT")
      << " with Article 6.1 of Regulation (EC) No 561/2006.\n\n";

  out << "Legal grounds:\n";
  for (const LegalGround& g : doc.grounds) {
    out << "  * " << g.instrument << ", " << g.article << ": \"" << g.quoted_text << "\"\n";
  }
  out << "\n";

  out << "Daily driving periods attributed to week " << doc.week.str() << ":\n";
  if (doc.facts.empty()) {
    out << "  (none)\n";
  } else {
    out << "  #    from                  to                    driving  attributed by\n";
    for (std::size_t i = 0; i < doc.facts.size(); ++i) {
      const FactTraceEntry& f = doc.facts[i];
      char row[160];
      std::snprintf(row, sizeof(row), "  %-4zu %-21s %-21s %7s  %s\n", i + 1,
                    timebase::format_instant(f.span.first).c_str(),
                    timebase::format_instant(f.span.second).c_str(), hmm(f.driving).c_str(),
                    interpretation::attribution_label(f.rule));
      out << row;
    }
  }
  out << "\n";
  out << "Interpretation policy applied: " << doc.policy.summary() << "\n";
  switch (doc.stability) {
    case Stability::StableCompliant:
      out << "Stability: every evaluated interpretation policy reaches this verdict.\n";
      break;
    case Stability::StableViolation:
      out << "Stability: every evaluated interpretation policy reaches this verdict.\n";
      break;
    case Stability::InterpretationDependent:
      out << "Stability: INTERPRETATION DEPENDENT - the verdict changes under other"
             " admissible readings of the text.\n";
      for (const InterpretationPolicy& p : doc.dissenting) {
        out << "  dissenting policy: " << p.summary() << "\n";
      }
      break;
  }
  out << "Thresholds: daily limit " << hmm(doc.params.article6.daily_limit)
      << ", extended limit " << hmm(doc.params.article6.extended_limit) << ", at most "
      << doc.params.article6.max_extensions << " extensions per week; qualifying daily rest "
      << hmm(doc.params.rest.daily_rest_min) << ", weekly rest "
      << hmm(doc.params.rest.weekly_rest_min) << ".\n";
  out << "Engine: " << doc.tool_version << "\n";
  return out.str();
}

DecisionDocument parse_document(std::string_view json_text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error("BadDocument", e.what());
  }
  try {
    DecisionDocument doc;
    doc.driver_id = j.at("driver_id").get<std::string>();
    doc.week = timebase::WeekId::parse(j.at("week").get<std::string>());
    doc.verdict = j.at("verdict").get<bool>();
    const std::string stability = j.at("stability").get<std::string>();
    if (stability == "stable_compliant") {
      doc.stability = Stability::StableCompliant;
    } else if (stability == "stable_violation") {
      doc.stability = Stability::StableViolation;
    } else if (stability == "interpretation_dependent") {
      doc.stability = Stability::InterpretationDependent;
    } else {
      throw Error("BadDocument", "unknown stability label: " + stability);
    }
    doc.policy = policy_from_json(j.at("policy"));
    for (const auto& p : j.at("dissenting_policies")) doc.dissenting.push_back(policy_from_json(p));
    for (const auto& g : j.at("grounds")) {
      doc.grounds.push_back(LegalGround{g.at("instrument").get<std::string>(),
                                        g.at("article").get<std::string>(),
                                        g.at("quoted_text").get<std::string>()});
    }
    for (const auto& f : j.at("facts")) {
      FactTraceEntry fact;
      fact.ddp_index = f.at("ddp_index").get<std::size_t>();
      fact.span = {timebase::parse_instant(f.at("span").at("start").get<std::string>()),
                   timebase::parse_instant(f.at("span").at("end").get<std::string>())};
      fact.driving = DurationMin(f.at("driving_min").get<std::int64_t>());
      fact.record_indices = f.at("record_indices").get<std::vector<std::size_t>>();
      fact.week = timebase::WeekId::parse(f.at("week").get<std::string>());
      fact.rule = interpretation::attribution_from_label(f.at("rule").get<std::string>());
      doc.facts.push_back(std::move(fact));
    }
    const auto& rest = j.at("params").at("rest");
    doc.params.rest.daily_rest_min = DurationMin(rest.at("daily_rest_min").get<std::int64_t>());
    doc.params.rest.weekly_rest_min = DurationMin(rest.at("weekly_rest_min").get<std::int64_t>());
    const auto& a6 = j.at("params").at("article6");
    doc.params.article6.daily_limit = DurationMin(a6.at("daily_limit_min").get<std::int64_t>());
    doc.params.article6.extended_limit =
        DurationMin(a6.at("extended_limit_min").get<std::int64_t>());
    doc.params.article6.max_extensions = a6.at("max_extensions").get<int>();
    doc.params.article6.weekly_dp_max_len = a6.at("weekly_dp_max_len").get<int>();
    doc.tool_version = j.at("tool_version").get<std::string>();
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error("BadDocument", e.what());
  }
}

}  // namespace dtc::decision
