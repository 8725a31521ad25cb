#include "nevsim/scenario/report.hpp"

#include <algorithm>
#include <array>

#include <fmt/format.h>

#include "nevsim/scenario/serialize.hpp"
#include "nevsim/telemetry.hpp"

namespace nevsim::scenario {

namespace {

struct ImpactRow {
  std::string_view label;
  std::string_view code;
  std::string_view unit_suffix;  // appended to text cells
  std::string_view unit;         // csv unit column
  double ecomodel::IndicatorVector::*field;
};

constexpr std::array<ImpactRow, 6> kImpactRows{{
    {"Land Degradation (LD)", "LD", "", "index", &ecomodel::IndicatorVector::ld},
    {"Pollutant Concentration (PC) – SO₂", "PC", " mg/m³", "mg/m3", &ecomodel::IndicatorVector::pc},
    {"Climate Change Impact (CCI)", "CCI", " °C", "degC", &ecomodel::IndicatorVector::cci},
    {"Forest Restoration (FR)", "FR", "%", "%", &ecomodel::IndicatorVector::fr},
    {"Waste Treatment Rate (WTR)", "WTR", "%", "%", &ecomodel::IndicatorVector::wtr},
    {"Lithium Sulfur Battery Chemical Toxicity (LSBCT)", "LSBCT", "", "index", &ecomodel::IndicatorVector::lsbct},
}};

constexpr std::string_view kGrowthLabel = "NEV Growth (Δ NEV Population)";
constexpr std::string_view kEfficiencyLabel = "Δ NEV Efficiency";
constexpr std::string_view kNotAvailable = "n/a";

// Display width in code points; every glyph used here is single-width.
std::size_t display_width(std::string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

using Row = std::array<std::string, 3>;

void render_block(std::string& out, std::string_view title, const std::vector<Row>& rows) {
  std::array<std::size_t, 3> width{};
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < 3; ++c) width[c] = std::max(width[c], display_width(row[c]));
  }
  const std::size_t total = width[0] + width[1] + width[2] + 4;
  out += title;
  out += '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string line;
    for (std::size_t c = 0; c < 3; ++c) {
      line += rows[r][c];
      if (c < 2) line.append(width[c] - display_width(rows[r][c]) + 2, ' ');
    }
    out += line;
    out += '\n';
    if (r == 0) out.append(total, '-') += '\n';
  }
}

std::string optional_value(const std::optional<double>& v) { return v ? format_value(*v) : std::string(kNotAvailable); }

std::string csv_number(double v) { return v == 0.0 ? "0" : fmt::format("{}", v); }
std::string csv_optional(const std::optional<double>& v) { return v ? csv_number(*v) : std::string(); }

}  // namespace

std::optional<ReportFormat> parse_report_format(std::string_view s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  if (s == "table" || s == "txt" || s == "text") return ReportFormat::Table;
  return std::nullopt;
}

std::string_view extension(ReportFormat f) {
  switch (f) {
    case ReportFormat::Json: return "json";
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Table: return "txt";
  }
  return "txt";
}

std::string format_value(double v) {
  std::string s = fmt::format("{:.6g}", v);
  if (s == "-0") s = "0";
  return s;
}

std::string render_table(const ScenarioResult& result) {
  std::vector<Row> impact{{"Indicator", "Before Simulation", "After Simulation"}};
  for (const auto& row : kImpactRows) {
    impact.push_back({std::string(row.label), format_value(result.before.*row.field) + std::string(row.unit_suffix),
                      format_value(result.after.*row.field) + std::string(row.unit_suffix)});
  }
  std::vector<Row> efficiency{
      {"Indicator", "Values", "Standardization"},
      {std::string(kGrowthLabel), format_value(result.delta_nev_population), optional_value(result.standardized_growth)},
      {std::string(kEfficiencyLabel), format_value(result.delta_nev_efficiency),
       optional_value(result.standardized_efficiency)},
  };

  std::string out;
  render_block(out, "Results of Environmental Impact", impact);
  out += '\n';
  render_block(out, "Results of NEV Efficiency", efficiency);
  if (!result.notes.empty()) {
    out += "\nNotes\n";
    for (const auto& note : result.notes) out += "- " + note + "\n";
  }
  return out;
}

std::string render_csv(const ScenarioResult& result) {
  std::string out = "table,indicator,unit,before,after,value,standardization\n";
  for (const auto& row : kImpactRows) {
    out += fmt::format("impact,{},{},{},{},,\n", row.code, row.unit, csv_number(result.before.*row.field),
                       csv_number(result.after.*row.field));
  }
  out += fmt::format("efficiency,delta_nev_population,,,,{},{}\n", csv_number(result.delta_nev_population),
                     csv_optional(result.standardized_growth));
  out += fmt::format("efficiency,delta_nev_efficiency,,,,{},{}\n", csv_number(result.delta_nev_efficiency),
                     csv_optional(result.standardized_efficiency));
  return out;
}

std::string render_report(const ScenarioResult& result, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return result_to_json(result);
    case ReportFormat::Csv: return render_csv(result);
    case ReportFormat::Table: return render_table(result);
  }
  return render_table(result);
}

std::string anomalies_csv(std::span<const behavior::Anomaly> anomalies) {
  std::string out = "vehicle_id,datetime,class,code\n";
  for (const auto& a : anomalies) {
    out += fmt::format("{},{},{},{}\n", a.vehicle_id, telemetry::format_timestamp(a.at),
                       behavior::to_string(a.anomaly_class), behavior::to_string(a.detail));
  }
  return out;
}

std::string profiles_csv(std::span<const behavior::BehaviorProfile> profiles) {
  std::string out =
      "vehicle_id,overcharge_rate,deep_discharge_rate,high_speed_fraction,mode_switch_count,"
      "pure_electric_share,charge_while_driving_share\n";
  for (const auto& p : profiles) {
    out += fmt::format("{},{},{},{},{},{},{}\n", p.vehicle_id, csv_number(p.overcharge_rate),
                       csv_number(p.deep_discharge_rate), csv_number(p.high_speed_fraction), p.mode_switch_count,
                       csv_number(p.pure_electric_share), csv_number(p.charge_while_driving_share));
  }
  return out;
}

}  // namespace nevsim::scenario
