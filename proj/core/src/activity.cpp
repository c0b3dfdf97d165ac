#include "dtc/activity.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dtc::activity {

namespace {

using timebase::Instant;

constexpr std::string_view kCsvHeader = "driver_id,start,end,kind,source";

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = eol + 1;
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return fields;
}

Instant parse_instant_at(std::string_view text, std::size_t line_no) {
  try {
    return timebase::parse_instant(text);
  } catch (const Error& e) {
    throw SyntaxError(line_no, e.what());
  }
}

struct RowData {
  std::string driver_id;
  ActivityRecord record;
};

RowData parse_csv_row(std::string_view line, std::size_t line_no) {
  auto fields = split_fields(line);
  if (fields.size() != 5) {
    throw SyntaxError(line_no, "expected 5 fields, got " + std::to_string(fields.size()));
  }
  if (fields[3].empty()) throw EmptyKindError(line_no);
  RowData row;
  row.driver_id = std::string(fields[0]);
  row.record.start = parse_instant_at(fields[1], line_no);
  row.record.end = parse_instant_at(fields[2], line_no);
  try {
    row.record.kind = kind_from_label(fields[3]);
    row.record.source = source_from_label(fields[4]);
  } catch (const Error& e) {
    throw SyntaxError(line_no, e.what());
  }
  return row;
}

RowData parse_jsonl_row(std::string_view line, std::size_t line_no) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw SyntaxError(line_no, e.what());
  }
  if (!obj.is_object()) throw SyntaxError(line_no, "expected a JSON object");
  for (const char* key : {"driver_id", "start", "end", "kind", "source"}) {
    if (!obj.contains(key) || !obj[key].is_string()) {
      throw SyntaxError(line_no, std::string("missing string field '") + key + "'");
    }
  }
  const std::string kind = obj["kind"].get<std::string>();
  if (kind.empty()) throw EmptyKindError(line_no);
  RowData row;
  row.driver_id = obj["driver_id"].get<std::string>();
  row.record.start = parse_instant_at(obj["start"].get<std::string>(), line_no);
  row.record.end = parse_instant_at(obj["end"].get<std::string>(), line_no);
  try {
    row.record.kind = kind_from_label(kind);
    row.record.source = source_from_label(obj["source"].get<std::string>());
  } catch (const Error& e) {
    throw SyntaxError(line_no, e.what());
  }
  return row;
}

timebase::Span clip(const ActivityRecord& r, timebase::Span span) {
  return {std::max(r.start, span.first), std::min(r.end, span.second)};
}

}  // namespace

std::string_view kind_label(ActivityKind k) {
  switch (k) {
    case ActivityKind::Driving: return "DRIVING";
    case ActivityKind::Rest: return "REST";
    case ActivityKind::OtherWork: return "OTHER_WORK";
    case ActivityKind::Availability: return "AVAILABILITY";
  }
  return "";
}

std::string_view source_label(RecordSource s) {
  return s == RecordSource::Automatic ? "AUTO" : "MANUAL";
}

ActivityKind kind_from_label(std::string_view label) {
  if (label == "DRIVING") return ActivityKind::Driving;
  if (label == "REST") return ActivityKind::Rest;
  if (label == "OTHER_WORK") return ActivityKind::OtherWork;
  if (label == "AVAILABILITY") return ActivityKind::Availability;
  throw Error("BadActivityKind", "unknown activity kind: " + std::string(label));
}

RecordSource source_from_label(std::string_view label) {
  if (label == "AUTO") return RecordSource::Automatic;
  if (label == "MANUAL") return RecordSource::Manual;
  throw Error("BadRecordSource", "unknown record source: " + std::string(label));
}

Timeline Timeline::validated(std::string driver_id, std::vector<ActivityRecord> records) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!(records[i].start < records[i].end)) throw InvalidRecordError(i);
    if (i > 0) {
      if (records[i].start < records[i - 1].start) throw OrderError(i);
      if (records[i - 1].end > records[i].start) throw OverlapError(i - 1, i);
    }
  }
  Timeline t;
  // A timeline with no records carries no driver: serialized forms encode the
  // driver per record, so this keeps parse(serialize(t)) == t.
  if (!records.empty()) t.driver_id_ = std::move(driver_id);
  t.records_ = std::move(records);
  return t;
}

Timeline parse_timeline(std::string_view input, LogFormat format) {
  auto lines = split_lines(input);
  std::string driver_id;
  std::vector<ActivityRecord> records;

  std::size_t line_no = 0;
  bool saw_header = false;
  for (std::string_view line : lines) {
    ++line_no;
    if (format == LogFormat::Csv && !saw_header) {
      if (line != kCsvHeader) {
        throw SyntaxError(line_no, "expected header '" + std::string(kCsvHeader) + "'");
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;

    RowData row = format == LogFormat::Csv ? parse_csv_row(line, line_no)
                                           : parse_jsonl_row(line, line_no);
    if (records.empty()) {
      driver_id = row.driver_id;
    } else if (row.driver_id != driver_id) {
      throw SyntaxError(line_no, "driver_id changes mid-file ('" + driver_id + "' vs '" +
                                     row.driver_id + "')");
    }
    records.push_back(row.record);
  }
  return Timeline::validated(std::move(driver_id), std::move(records));
}

Timeline load_timeline(const std::string& path, LogFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("FileNotFound", "cannot open activity log: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_timeline(buf.str(), format);
}

std::string serialize_timeline(const Timeline& t, LogFormat format) {
  std::string out;
  if (format == LogFormat::Csv) {
    out.append(kCsvHeader);
    out.push_back('\n');
    for (const ActivityRecord& r : t.records()) {
      out.append(t.driver_id());
      out.push_back(',');
      out.append(timebase::format_instant(r.start));
      out.push_back(',');
      out.append(timebase::format_instant(r.end));
      out.push_back(',');
      out.append(kind_label(r.kind));
      out.push_back(',');
      out.append(source_label(r.source));
      out.push_back('\n');
    }
    return out;
  }
  for (const ActivityRecord& r : t.records()) {
    nlohmann::ordered_json obj;
    obj["driver_id"] = t.driver_id();
    obj["start"] = timebase::format_instant(r.start);
    obj["end"] = timebase::format_instant(r.end);
    obj["kind"] = std::string(kind_label(r.kind));
    obj["source"] = std::string(source_label(r.source));
    out.append(obj.dump());
    out.push_back('\n');
  }
  return out;
}

std::int64_t driving_seconds(const Timeline& t, timebase::Span span,
                             const timebase::LeapTable& table,
                             timebase::LeapPolicy policy) {
  if (span.first > span.second) throw timebase::NegativeSpan{};
  std::int64_t total = 0;
  for (const ActivityRecord& r : t.records()) {
    if (r.kind != ActivityKind::Driving) continue;
    auto [lo, hi] = clip(r, span);
    if (lo < hi) total += timebase::physical_seconds_between(lo, hi, table, policy);
  }
  return total;
}

timebase::DurationMin total_driving(const Timeline& t, timebase::Span span,
                                    const timebase::LeapTable& table,
                                    timebase::LeapPolicy policy) {
  if (span.first > span.second) throw timebase::NegativeSpan{};
  std::int64_t minutes = 0;
  for (const ActivityRecord& r : t.records()) {
    if (r.kind != ActivityKind::Driving) continue;
    auto [lo, hi] = clip(r, span);
    if (lo < hi) minutes += timebase::duration_between(lo, hi, table, policy).minutes();
  }
  return timebase::DurationMin(minutes);
}

void validate_leap_flags(const Timeline& t, const timebase::LeapTable& table) {
  for (std::size_t i = 0; i < t.records().size(); ++i) {
    const ActivityRecord& r = t.records()[i];
    if (!timebase::leap_flag_valid(r.start, table) ||
        !timebase::leap_flag_valid(r.end, table)) {
      throw Error("InvalidLeapInstant",
                  "record " + std::to_string(i) +
                      " uses second 60 on a day with no positive leap entry");
    }
  }
}

}  // namespace dtc::activity
