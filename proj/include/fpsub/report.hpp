#pragma once

#include <span>
#include <string>
#include <string_view>

#include "fpsub/check_report.hpp"

namespace fpsub {

enum class ReportFormat { kHuman, kJson, kCsv };

/// "human", "json", "csv"; throws ValidationError("format") otherwise.
ReportFormat parse_report_format(std::string_view name);

/// Column order is fixed: check, route, point, residual, tolerance, pass,
/// anchor, note. Only the human table carries timings, so json and csv are
/// byte-identical across runs. Residuals are written at 17 significant
/// digits (json: shortest round-trip form). An empty list gives the header
/// alone.
std::string emit_report(std::span<const CheckReport> reports, ReportFormat format);

bool all_pass(std::span<const CheckReport> reports);

}  // namespace fpsub
