#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "nevsim/behavior.hpp"
#include "nevsim/scenario/pipeline.hpp"

namespace nevsim::scenario {

enum class ReportFormat { Json, Csv, Table };

std::optional<ReportFormat> parse_report_format(std::string_view s);
std::string_view extension(ReportFormat f);  // "json", "csv", "txt"

/// Numbers as printed in reports: six significant digits, no negative zero.
std::string format_value(double v);

/// Two aligned tables: "Indicator / Before Simulation / After Simulation"
/// for the six indicators, then "Indicator / Values / Standardization".
std::string render_table(const ScenarioResult& result);

/// Header `table,indicator,unit,before,after,value,standardization`; six
/// impact rows followed by two efficiency rows.
std::string render_csv(const ScenarioResult& result);

std::string render_report(const ScenarioResult& result, ReportFormat format);

std::string anomalies_csv(std::span<const behavior::Anomaly> anomalies);
std::string profiles_csv(std::span<const behavior::BehaviorProfile> profiles);

}  // namespace nevsim::scenario
