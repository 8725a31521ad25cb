#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nevsim/behavior.hpp"
#include "nevsim/ecomodel.hpp"
#include "nevsim/forecast/bayes_opt.hpp"
#include "nevsim/forecast/trainer.hpp"
#include "nevsim/scenario/config.hpp"
#include "nevsim/weighting.hpp"

namespace nevsim::scenario {

struct CodeCount {
  std::string code;
  std::size_t count = 0;

  bool operator==(const CodeCount&) const = default;
};

struct AnomalySummary {
  std::size_t total = 0;
  std::vector<CodeCount> by_code;  // nonzero codes in AnomalyCode order
  std::size_t stream_violations = 0;

  bool operator==(const AnomalySummary&) const = default;
};

/// Tuning log and final-fit diagnostics of one extended driver series.
/// Failed tuning evaluations carry validation_mse = +inf.
struct SeriesForecast {
  std::string series;
  forecast::Hyperparams best;
  double best_validation_mse = 0.0;
  std::vector<forecast::TuningEvaluation> tuning_log;
  forecast::FitDiagnostics diagnostics;

  bool operator==(const SeriesForecast&) const = default;
};

struct ScenarioResult {
  std::uint64_t seed = 0;
  int horizon = 0;
  std::size_t records = 0;
  std::size_t rejected_rows = 0;
  std::size_t vehicles = 0;

  ecomodel::IndicatorVector before;
  ecomodel::IndicatorVector after;
  double nevi_before = 0.0;
  double nevi_after = 0.0;
  double efficiency_before = 0.0;
  double efficiency_after = 0.0;

  /// Coefficients used, with entropy-derived groups filled in.
  ecomodel::CoefficientSet coefficients;
  /// Entropy weighting of the seven efficiency terms; when the weights were
  /// configured, only `weights` is set.
  weighting::WeightVector weights;

  double delta_nev_population = 0.0;
  double delta_nev_efficiency = 0.0;
  /// Absent when delta_nev_population is zero.
  std::optional<double> standardized_growth;
  std::optional<double> standardized_efficiency;

  AnomalySummary anomalies;
  behavior::CorrelationReport correlations;
  std::vector<SeriesForecast> forecasts;  // in driver-series order
  std::vector<std::string> notes;

  bool operator==(const ScenarioResult&) const = default;
};

/// One driver series: observed bucket values followed by the extension.
struct SeriesArchive {
  std::string name;
  std::size_t observed = 0;
  std::vector<double> values;
};

struct NamedModel {
  std::string series;
  forecast::ForecastModel model;
};

/// Everything a run produces. Only `result` is needed to re-render reports.
struct ScenarioRun {
  ScenarioResult result;
  std::vector<SeriesArchive> archive;
  std::vector<behavior::Anomaly> anomalies;
  std::vector<behavior::BehaviorProfile> profiles;
  std::vector<NamedModel> models;
};

/// Records from every configured source, merged and sorted.
struct LoadedTelemetry {
  std::vector<telemetry::TelemetryRecord> records;
  std::vector<telemetry::Rejection> rejections;  // rows are per source file
  std::vector<telemetry::StreamViolation> violations;
};

/// Generates the synthetic fleet (if configured) and parses every path.
/// Throws Error{Io} for a missing file and Error{EmptyStream} when nothing
/// was accepted.
LoadedTelemetry load_telemetry(const TelemetrySource& source);

/// Stage names used to tag errors, in pipeline order.
inline constexpr std::array<std::string_view, 6> kStages{"ingest", "behavior", "forecast",
                                                         "weighting", "ecomodel", "efficiency"};

/// Per-stage seeds: derive_seed(config.seed, label), with labels
/// "forecast/<series>" for tuning and "ecomodel" for the noise draws.
///
/// Errors are rethrown with the failing stage prefixed to the message,
/// keeping their ErrorCode. A zero population delta is recorded as a note.
ScenarioRun run_scenario(const ScenarioConfig& config);

/// Driver series bucketed from a sorted multi-vehicle stream. Buckets are
/// `bucket_s` long and aligned to multiples of it; an empty bucket repeats
/// the previous value.
std::vector<SeriesArchive> driver_series(std::span<const telemetry::TelemetryRecord> sorted,
                                         const ScenarioConfig& config);

/// Renders every output file in memory, then writes them under `out_dir`:
/// report.{json,csv,txt}, plots/*.svg, anomalies.csv, profiles.csv and
/// models/<series>.json. Throws Error{Io} if a file cannot be written.
void write_outputs(const ScenarioRun& run, const std::filesystem::path& out_dir);

}  // namespace nevsim::scenario
