#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "produkt/error.hpp"

#ifndef PRODUKT_VERSION
#define PRODUKT_VERSION "0.1.0"
#endif

namespace produkt {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchema = 1;

/// One experiment run. `seconds` is the only non-deterministic field.
struct RunRecord {
  std::string command;
  std::string group;
  std::uint64_t order = 0;
  std::uint64_t set_size = 0;
  std::uint64_t N = 0;
  double ratio = 0.0;
  bool complete = false;
  double seconds = 0.0;
  std::string certificate;
  Json reference = Json::object();
  Json measured = Json::object();

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  friend bool operator==(const Table&, const Table&) = default;
};

struct Report {
  std::string version = PRODUKT_VERSION;
  std::vector<std::string> config;
  std::vector<RunRecord> runs;
  Json aggregates = Json::object();
  std::optional<Table> table;
  Json attachments = Json::object();

  friend bool operator==(const Report&, const Report&) = default;
};

inline const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols{"group", "order", "set_size", "N", "ratio", "complete", "seconds"};
  return cols;
}

inline std::string format_number(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline Json record_json(const RunRecord& r) {
  Json j;
  j["command"] = r.command;
  j["group"] = r.group;
  j["order"] = r.order;
  j["set_size"] = r.set_size;
  j["N"] = r.N;
  j["ratio"] = r.ratio;
  j["complete"] = r.complete;
  j["seconds"] = r.seconds;
  j["certificate"] = r.certificate;
  j["reference"] = r.reference;
  j["measured"] = r.measured;
  return j;
}

inline RunRecord record_from_json(const Json& j) {
  return {j.at("command").get<std::string>(), j.at("group").get<std::string>(), j.at("order").get<std::uint64_t>(),
          j.at("set_size").get<std::uint64_t>(), j.at("N").get<std::uint64_t>(), j.at("ratio").get<double>(),
          j.at("complete").get<bool>(), j.at("seconds").get<double>(), j.at("certificate").get<std::string>(),
          j.at("reference"), j.at("measured")};
}

inline Json report_json(const Report& r) {
  Json j;
  j["schema"] = kReportSchema;
  j["version"] = r.version;
  j["config"] = r.config;
  Json runs = Json::array();
  for (const auto& rec : r.runs) runs.push_back(record_json(rec));
  j["runs"] = std::move(runs);
  j["aggregates"] = r.aggregates;
  if (r.table) j["table"] = {{"columns", r.table->columns}, {"rows", r.table->rows}};
  else j["table"] = nullptr;
  j["attachments"] = r.attachments;
  return j;
}

inline std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(cells[i]);
  }
  return out + '\n';
}

/// json: the full report. csv: the report's table when it has one (growth,
/// np-scan), otherwise one row per run.
inline std::string emit_report(const Report& r, std::string_view format) {
  if (format == "json") return report_json(r).dump(2) + "\n";
  if (format != "csv") fail(ErrorCode::UnsupportedFormat, "unknown report format '" + std::string(format) + "'");
  if (r.table) {
    std::string out = csv_line(r.table->columns);
    for (const auto& row : r.table->rows) out += csv_line(row);
    return out;
  }
  std::string out = csv_line(record_columns());
  for (const auto& rec : r.runs)
    out += csv_line({rec.group, std::to_string(rec.order), std::to_string(rec.set_size), std::to_string(rec.N),
                     format_number(rec.ratio), rec.complete ? "true" : "false", format_number(rec.seconds, 3)});
  return out;
}

inline Report parse_report(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("report: ") + e.what());
  }
  if (j.value("schema", 0) != kReportSchema) fail(ErrorCode::ParseError, "unsupported report schema");
  Report r;
  try {
    r.version = j.at("version").get<std::string>();
    r.config = j.at("config").get<std::vector<std::string>>();
    for (const auto& rec : j.at("runs")) r.runs.push_back(record_from_json(rec));
    r.aggregates = j.at("aggregates");
    if (!j.at("table").is_null())
      r.table = Table{j.at("table").at("columns").get<std::vector<std::string>>(),
                      j.at("table").at("rows").get<std::vector<std::vector<std::string>>>()};
    r.attachments = j.at("attachments");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("report: ") + e.what());
  }
  return r;
}

/// Report with every `seconds` zeroed, for determinism comparisons.
inline Report without_timings(Report r) {
  for (auto& rec : r.runs) rec.seconds = 0.0;
  return r;
}

}  // namespace produkt
