#include "fpsub/report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "fpsub/errors.hpp"

namespace fpsub {

namespace {

constexpr std::array<const char*, 8> kColumns{"check",     "route", "point",  "residual",
                                              "tolerance", "pass",  "anchor", "note"};

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sci(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*e", digits, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string emit_csv(std::span<const CheckReport> reports) {
  std::ostringstream out;
  for (std::size_t i = 0; i < kColumns.size(); ++i) out << (i ? "," : "") << kColumns[i];
  out << "\n";
  for (const auto& r : reports) {
    out << csv_field(r.check) << ',' << csv_field(r.route) << ',' << csv_field(r.point) << ','
        << g17(r.residual) << ',' << g17(r.tolerance) << ',' << (r.pass ? "true" : "false") << ','
        << csv_field(r.anchor) << ',' << csv_field(r.note) << "\n";
  }
  return out.str();
}

std::string emit_json(std::span<const CheckReport> reports) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["check"] = r.check;
    j["route"] = r.route;
    j["point"] = r.point;
    j["residual"] = r.residual;  // NaN is written as null
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    j["anchor"] = r.anchor;
    j["note"] = r.note;
    list.push_back(std::move(j));
  }
  nlohmann::ordered_json doc;
  doc["columns"] = kColumns;
  doc["reports"] = std::move(list);
  return doc.dump(2) + "\n";
}

std::string emit_human(std::span<const CheckReport> reports) {
  std::vector<std::array<std::string, 7>> rows;
  rows.push_back({"check", "route", "point", "residual", "tolerance", "status", "time[s]"});
  for (const auto& r : reports) {
    char t[32];
    std::snprintf(t, sizeof t, "%.3f", r.seconds);
    rows.push_back({r.check, r.route, r.point, sci(r.residual, 3), sci(r.tolerance, 1),
                    r.pass ? "PASS" : "FAIL", t});
  }
  std::array<std::size_t, 7> width{};
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << row[c];
      if (c + 1 < row.size()) out << std::string(width[c] - row[c].size() + 2, ' ');
    }
    out << "\n";
  }
  std::size_t failed = 0;
  for (const auto& r : reports) {
    if (r.pass) continue;
    ++failed;
    if (!r.note.empty()) out << "  " << r.check << ": " << r.note << "\n";
  }
  if (!reports.empty()) out << reports.size() << " checks, " << failed << " failed\n";
  return out.str();
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "human") return ReportFormat::kHuman;
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  throw ValidationError("format", "unknown report format '" + std::string(name) + "' (human, json, csv)");
}

std::string emit_report(std::span<const CheckReport> reports, ReportFormat format) {
  switch (format) {
    case ReportFormat::kHuman:
      return emit_human(reports);
    case ReportFormat::kJson:
      return emit_json(reports);
    case ReportFormat::kCsv:
      return emit_csv(reports);
  }
  return {};
}

bool all_pass(std::span<const CheckReport> reports) {
  return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass; });
}

}  // namespace fpsub
