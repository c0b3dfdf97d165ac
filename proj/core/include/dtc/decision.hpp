#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "dtc/interpretation.hpp"

namespace dtc::decision {

// One provision quoted verbatim from the bundled provisions file.
struct LegalGround {
  std::string instrument;
  std::string article;
  std::string quoted_text;

  friend bool operator==(const LegalGround&, const LegalGround&) = default;
};

// Verbatim provision texts, loaded from a versioned data file rather than
// hard-coded: the file is the auditable source of every quotation.
class ProvisionsLibrary {
 public:
  static ProvisionsLibrary parse(std::string_view text);
  static ProvisionsLibrary load(const std::string& path);

  const LegalGround* find(std::string_view article) const;
  const std::vector<LegalGround>& all() const noexcept { return grounds_; }

  // Grounds cited by every verdict: Article 6.1 plus the Article 4
  // definitions of week, driving time and daily driving time.
  std::vector<LegalGround> grounds_for_verdict() const;

 private:
  std::vector<LegalGround> grounds_;
};

// One daily driving period as it entered a weekly pattern: where it came
// from, what it contributed, and under which attribution.
struct FactTraceEntry {
  std::size_t ddp_index = 0;
  timebase::Span span;
  timebase::DurationMin driving;
  std::vector<std::size_t> record_indices;
  timebase::WeekId week;
  interpretation::AttributionRule rule = interpretation::AttributionRule::StartWeek;

  friend bool operator==(const FactTraceEntry&, const FactTraceEntry&) = default;
};

// Verdict, legal grounds, factual trace and the interpretation policy that
// produced it. The verdict is recomputable from the cited facts alone.
struct DecisionDocument {
  std::string driver_id;
  timebase::WeekId week;
  bool verdict = true;
  interpretation::Stability stability = interpretation::Stability::StableCompliant;
  interpretation::InterpretationPolicy policy;
  std::vector<interpretation::InterpretationPolicy> dissenting;  // non-empty only when
                                                                 // interpretation dependent
  std::vector<LegalGround> grounds;
  std::vector<FactTraceEntry> facts;
  interpretation::EvalParams params;
  std::string tool_version;

  friend bool operator==(const DecisionDocument&, const DecisionDocument&) = default;
};

struct PolicyNotEvaluated : Error {
  explicit PolicyNotEvaluated(const std::string& summary)
      : Error("PolicyNotEvaluated", "policy " + summary + " is not part of the report") {}
};

struct DanglingReference : Error {
  std::size_t record_index;
  explicit DanglingReference(std::size_t idx)
      : Error("DanglingReference",
              "cited record " + std::to_string(idx) + " does not exist in the timeline"),
        record_index(idx) {}
};

struct FactMismatch : Error {
  std::size_t entry_index;
  explicit FactMismatch(std::size_t idx)
      : Error("FactMismatch", "fact entry " + std::to_string(idx) +
                                  " does not match the driving recomputed from its records"),
        entry_index(idx) {}
};

// One document per week in the chosen policy's verdict map. Facts list
// exactly the period fragments attributed to the week; stability is copied
// from the report, with the dissenting policies named when it is
// interpretation dependent.
std::vector<DecisionDocument> motivate(const activity::Timeline& t,
                                       const interpretation::InterpretationReport& report,
                                       const interpretation::InterpretationPolicy& chosen,
                                       const interpretation::EvalParams& params,
                                       const timebase::LeapTable& table,
                                       const ProvisionsLibrary& provisions);

// Recomputes every fact from its cited records and reruns the weekly check.
// Throws DanglingReference / FactMismatch on broken citations; returns
// whether the recomputed verdict equals the documented one.
bool replay(const DecisionDocument& doc, const activity::Timeline& t,
            const interpretation::EvalParams& params, const timebase::LeapTable& table);

enum class RenderMode { Text, Json };

// Text mode is the citizen-facing rendering: verdict sentence, quoted
// grounds, per-period table with H:MM durations, policy summary, stability
// note. Json mode is schema-stable. Both are byte-deterministic.
std::string render(const DecisionDocument& doc, RenderMode mode);

DecisionDocument parse_document(std::string_view json_text);

}  // namespace dtc::decision
