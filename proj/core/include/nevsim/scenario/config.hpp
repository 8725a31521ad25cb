#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nevsim/behavior.hpp"
#include "nevsim/ecomodel.hpp"
#include "nevsim/fleet.hpp"
#include "nevsim/forecast/bayes_opt.hpp"

namespace nevsim::scenario {

struct TelemetrySource {
  std::vector<std::filesystem::path> paths;
  std::optional<fleet::FleetSpec> synthetic;
};

/// Maps one extended driver series onto an IndicatorInputs field:
/// field = offset + scale * value, where value is first converted to kg CO2
/// when via_co2 is set.
struct DriverMapping {
  std::string series;
  std::string target;
  double offset = 0.0;
  double scale = 1.0;
  bool via_co2 = false;

  bool operator==(const DriverMapping&) const = default;
};

/// Names of the driver series the pipeline derives from telemetry.
inline constexpr std::array<std::string_view, 3> kDriverSeries{"soc_stress", "high_speed_fraction",
                                                               "energy_kwh"};

std::vector<DriverMapping> default_driver_mappings();

struct ForecastSettings {
  forecast::HyperparamSpace space;
  int budget = 25;
  double split = 0.8;
};

/// Coefficient groups of the indicator equations, in CoefficientSet order.
enum class CoefficientGroup : std::size_t { L, GPc, C, D, E, GLsbct, W };
inline constexpr std::size_t kCoefficientGroupCount = 7;
inline constexpr std::array<std::string_view, kCoefficientGroupCount> kCoefficientGroupNames{
    "l", "g_pc", "c", "d", "e", "g_lsbct", "w"};

struct FixtureInputs {
  ecomodel::IndicatorInputs before;
  ecomodel::IndicatorInputs after;
};

struct ScenarioConfig {
  TelemetrySource telemetry;
  int horizon = 0;
  double nev_population = 0.316;
  double delta_nev_population = 0.0;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";

  behavior::AnomalyConfig anomaly;
  behavior::ProfileConfig profile;
  double overcharge_weight = 0.5;
  double deep_discharge_weight = 0.5;
  telemetry::EpochSeconds bucket_s = 21600;

  ForecastSettings forecast;

  ecomodel::IndicatorInputs inputs;
  ecomodel::CoefficientSet coefficients;
  /// Groups absent from the config are derived by entropy weighting.
  std::array<bool, kCoefficientGroupCount> coefficients_given{};
  double grid_factor_kg_per_kwh = 0.5;
  std::vector<DriverMapping> drivers = default_driver_mappings();

  /// Explicit before/after inputs; skips ingest, behavior and forecasting.
  std::optional<FixtureInputs> fixture;
};

/// Parses JSON config text. Relative telemetry paths resolve against
/// `base_dir`. Throws Error{Config} on malformed JSON, wrong types or
/// out-of-range values.
ScenarioConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});

/// Throws Error{Config} naming the path when it cannot be read.
ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace nevsim::scenario
