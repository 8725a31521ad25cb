#include "nevsim/scenario/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "nevsim/error.hpp"
#include "nevsim/fleet.hpp"
#include "nevsim/random.hpp"
#include "nevsim/scenario/plots.hpp"
#include "nevsim/scenario/report.hpp"
#include "nevsim/scenario/serialize.hpp"

namespace nevsim::scenario {

namespace {

using ecomodel::IndicatorInputs;
using telemetry::ChargingStatus;
using telemetry::EpochSeconds;
using telemetry::TelemetryRecord;

template <typename F>
auto in_stage(std::string_view stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{} stage: {}", stage, e.what()));
  }
}

EpochSeconds floor_div(EpochSeconds a, EpochSeconds b) {
  EpochSeconds q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

AnomalySummary summarize(std::span<const behavior::Anomaly> anomalies, std::size_t violations) {
  using behavior::AnomalyCode;
  constexpr std::array kCodes{AnomalyCode::NonMonotoneTimestamp, AnomalyCode::DuplicateTimestamp,
                              AnomalyCode::TimeGap,              AnomalyCode::ImmediateShutdown,
                              AnomalyCode::SocDropWhileCharging, AnomalyCode::FuelWhileCharging,
                              AnomalyCode::ShortModeDwell};
  AnomalySummary s;
  s.total = anomalies.size();
  s.stream_violations = violations;
  for (auto code : kCodes) {
    const auto n = static_cast<std::size_t>(
        std::count_if(anomalies.begin(), anomalies.end(), [&](const auto& a) { return a.detail == code; }));
    if (n > 0) s.by_code.push_back({std::string(behavior::to_string(code)), n});
  }
  return s;
}

// Input fields feeding each coefficient group, in coefficient order.
const std::array<std::vector<std::string_view>, 6> kGroupFields{{
    {"pop", "t_r", "alpha", "area"},
    {"c_industrial", "c_traffic", "c_waste", "rad"},
    {"d_temperature", "d_precipitation"},
    {"vfc", "di", "r_recovery"},
    {"c_waste", "p_policy"},
    {"charging_behavior", "temperature_stress", "driving_speed"},
}};

std::span<double> group_span(ecomodel::CoefficientSet& k, std::size_t group) {
  switch (static_cast<CoefficientGroup>(group)) {
    case CoefficientGroup::L: return k.l;
    case CoefficientGroup::GPc: return k.g_pc;
    case CoefficientGroup::C: return k.c;
    case CoefficientGroup::D: return k.d;
    case CoefficientGroup::E: return k.e;
    case CoefficientGroup::GLsbct: return k.g_lsbct;
    case CoefficientGroup::W: return k.w;
  }
  return {};
}

// Efficiency terms in weight order; impacts count as costs.
constexpr std::array<weighting::Direction, 7> kEfficiencyDirections{
    weighting::Direction::Cost,    weighting::Direction::Cost,    weighting::Direction::Cost,
    weighting::Direction::Benefit, weighting::Direction::Benefit, weighting::Direction::Benefit,
    weighting::Direction::Cost};
constexpr std::array<std::string_view, 7> kEfficiencyTerms{"ld", "pc", "cci", "fr", "wtr", "nevi", "lsbct"};

// Indicator inputs over the simulated timeline: observed buckets, then the
// extension. NEVI ramps linearly from the configured share to share + delta
// across the extension.
class Timeline {
 public:
  Timeline(const ScenarioConfig& config, std::span<const SeriesArchive> archive, std::size_t observed,
           double delta_population)
      : config_(config), archive_(archive), observed_(observed), delta_(delta_population) {}

  std::size_t rows() const {
    if (config_.fixture) return 2;
    return observed_ + static_cast<std::size_t>(config_.horizon);
  }
  std::size_t before_row() const { return config_.fixture ? 0 : observed_ - 1; }
  std::size_t after_row() const { return rows() - 1; }

  double nevi(std::size_t t) const {
    if (config_.fixture) return config_.nev_population + (t == 0 ? 0.0 : delta_);
    if (config_.horizon == 0 || t + 1 <= observed_) return config_.nev_population;
    return config_.nev_population +
           delta_ * static_cast<double>(t + 1 - observed_) / static_cast<double>(config_.horizon);
  }

  IndicatorInputs inputs(std::size_t t) const {
    IndicatorInputs in = config_.fixture ? (t == 0 ? config_.fixture->before : config_.fixture->after) : config_.inputs;
    if (!config_.fixture) {
      for (const auto& m : config_.drivers) {
        const auto it = std::find_if(archive_.begin(), archive_.end(), [&](const auto& s) { return s.name == m.series; });
        double v = it->values[t];
        if (m.via_co2) v = ecomodel::electricity_to_co2(std::max(v, 0.0), config_.grid_factor_kg_per_kwh);
        *ecomodel::input_field(in, m.target) = m.offset + m.scale * v;
      }
    }
    in.nevi = nevi(t);
    ecomodel::validate(in);
    return in;
  }

 private:
  const ScenarioConfig& config_;
  std::span<const SeriesArchive> archive_;
  std::size_t observed_;
  double delta_;
};

bool series_used(const ScenarioConfig& config, std::string_view name) {
  return std::any_of(config.drivers.begin(), config.drivers.end(), [&](const auto& m) { return m.series == name; });
}

}  // namespace

LoadedTelemetry load_telemetry(const TelemetrySource& source) {
  LoadedTelemetry out;
  if (source.synthetic) out.records = fleet::generate_fleet(*source.synthetic).records;
  for (const auto& path : source.paths) {
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorCode::Io, fmt::format("telemetry file '{}' does not exist", path.string()));
    }
    auto parsed = telemetry::parse_telemetry_file(path);
    out.rejections.insert(out.rejections.end(), parsed.report.rejection_reasons.begin(),
                          parsed.report.rejection_reasons.end());
    out.records.insert(out.records.end(), std::make_move_iterator(parsed.records.begin()),
                       std::make_move_iterator(parsed.records.end()));
  }
  telemetry::sort_records(out.records);
  if (out.records.empty()) throw Error(ErrorCode::EmptyStream, "no telemetry records accepted");
  out.violations = telemetry::validate_stream(out.records);
  return out;
}

std::vector<SeriesArchive> driver_series(std::span<const TelemetryRecord> sorted, const ScenarioConfig& config) {
  if (sorted.empty()) throw Error(ErrorCode::EmptyStream, "driver_series: empty stream");
  const EpochSeconds bucket = config.bucket_s;
  EpochSeconds t_min = sorted.front().timestamp, t_max = t_min;
  for (const auto& r : sorted) {
    t_min = std::min(t_min, r.timestamp);
    t_max = std::max(t_max, r.timestamp);
  }
  const EpochSeconds first = floor_div(t_min, bucket);
  const auto count = static_cast<std::size_t>(floor_div(t_max, bucket) - first + 1);
  auto index = [&](EpochSeconds t) { return static_cast<std::size_t>(floor_div(t, bucket) - first); };

  std::vector<double> stress(count), speed(count), energy(count);
  std::vector<std::size_t> vehicles(count);
  for (const auto& trace : telemetry::split_by_vehicle(sorted)) {
    const auto dwell = behavior::record_dwells(trace.records);
    std::size_t begin = 0;
    while (begin < trace.records.size()) {
      const auto b = index(trace.records[begin].timestamp);
      std::size_t end = begin;
      while (end < trace.records.size() && index(trace.records[end].timestamp) == b) {
        const auto& r = trace.records[end];
        if (r.charging_status == ChargingStatus::ParkedCharging) energy[b] += std::abs(r.power) * dwell[end] / 3600.0;
        ++end;
      }
      const auto profile = behavior::build_profile(trace.records.subspan(begin, end - begin), config.profile);
      stress[b] += ecomodel::charging_behavior(profile, config.overcharge_weight, config.deep_discharge_weight);
      speed[b] += profile.high_speed_fraction;
      ++vehicles[b];
      begin = end;
    }
  }
  for (std::size_t b = 0; b < count; ++b) {
    if (vehicles[b] == 0) {
      stress[b] = stress[b - 1];
      speed[b] = speed[b - 1];
      energy[b] = energy[b - 1];
    } else {
      stress[b] /= static_cast<double>(vehicles[b]);
      speed[b] /= static_cast<double>(vehicles[b]);
    }
  }
  return {{std::string(kDriverSeries[0]), count, std::move(stress)},
          {std::string(kDriverSeries[1]), count, std::move(speed)},
          {std::string(kDriverSeries[2]), count, std::move(energy)}};
}

ScenarioRun run_scenario(const ScenarioConfig& config) {
  ScenarioRun run;
  auto& result = run.result;
  result.seed = config.seed;
  result.horizon = config.horizon;
  if (config.horizon < 0) throw Error(ErrorCode::Config, "horizon must be >= 0");

  std::size_t observed = 0;
  if (!config.fixture) {
    const auto data = in_stage("ingest", [&] { return load_telemetry(config.telemetry); });
    result.records = data.records.size();
    result.rejected_rows = data.rejections.size();
    result.vehicles = telemetry::split_by_vehicle(data.records).size();

    in_stage("behavior", [&] {
      run.anomalies = behavior::detect_fleet_anomalies(data.records, config.anomaly);
      run.profiles = behavior::build_fleet_profiles(data.records, config.profile);
      result.anomalies = summarize(run.anomalies, data.violations.size());
      result.correlations = behavior::correlation_report(data.records);
      run.archive = driver_series(data.records, config);
    });
    observed = run.archive.front().values.size();

    in_stage("forecast", [&] {
      if (config.horizon == 0) return;
      for (auto& series : run.archive) {
        if (!series_used(config, series.name)) continue;
        const auto tuning = forecast::bayes_optimize(series.values, config.forecast.space, config.forecast.budget,
                                                     derive_seed(config.seed, "forecast/" + series.name),
                                                     config.forecast.split);
        auto fit = forecast::train(series.values, tuning.best, config.forecast.split);
        series.values = forecast::extend_series(fit.model, series.values, config.horizon);
        result.forecasts.push_back(
            {series.name, tuning.best, tuning.best_validation_mse, tuning.log, std::move(fit.diagnostics)});
        run.models.push_back({series.name, std::move(fit.model)});
      }
    });
  }

  // Zero growth without an extension: the snapshot scenario.
  const double delta_population = (config.fixture || config.horizon > 0) ? config.delta_nev_population : 0.0;
  const Timeline timeline(config, run.archive, observed, delta_population);

  auto& k = result.coefficients;
  k = config.coefficients;
  k.seed = derive_seed(config.seed, "ecomodel");

  in_stage("weighting", [&] {
    std::vector<IndicatorInputs> rows;
    for (std::size_t t = 0; t < timeline.rows(); ++t) rows.push_back(timeline.inputs(t));

    for (std::size_t g = 0; g < kGroupFields.size(); ++g) {
      if (config.coefficients_given[g]) continue;
      weighting::IndicatorMatrix m;
      m.rows = rows.size();
      m.cols = kGroupFields[g].size();
      m.directions.assign(m.cols, weighting::Direction::Benefit);
      for (const auto& in : rows) {
        for (auto field : kGroupFields[g]) m.values.push_back(ecomodel::input_field(in, field));
      }
      const auto w = weighting::ewm(m);
      std::copy(w.weights.begin(), w.weights.end(), group_span(k, g).begin());
      result.notes.push_back(fmt::format("coefficients {} derived by entropy weighting", kCoefficientGroupNames[g]));
    }

    if (config.coefficients_given[static_cast<std::size_t>(CoefficientGroup::W)]) {
      result.weights.weights.assign(k.w.begin(), k.w.end());
      return;
    }
    weighting::IndicatorMatrix m;
    m.rows = rows.size();
    m.cols = kEfficiencyTerms.size();
    m.directions.assign(kEfficiencyDirections.begin(), kEfficiencyDirections.end());
    m.names.assign(kEfficiencyTerms.begin(), kEfficiencyTerms.end());
    for (std::size_t t = 0; t < rows.size(); ++t) {
      const auto v = ecomodel::evaluate_indicators(rows[t], k);
      for (double x : {v.ld, v.pc, v.cci, v.fr, v.wtr, timeline.nevi(t), v.lsbct}) m.values.push_back(x);
    }
    result.weights = weighting::ewm(m);
    result.notes.push_back("efficiency weights derived by entropy weighting");
    std::copy(result.weights.weights.begin(), result.weights.weights.end(), k.w.begin());
    if (result.weights.uniform_fallback) result.notes.push_back("efficiency weights fell back to uniform");
  });

  in_stage("ecomodel", [&] {
    ecomodel::NoiseSource noise(k.noise_sigma, k.seed);
    result.nevi_before = timeline.nevi(timeline.before_row());
    result.before = ecomodel::evaluate_indicators(timeline.inputs(timeline.before_row()), k, &noise);
    result.efficiency_before =
        ecomodel::nev_efficiency(result.before, result.nevi_before, k.w, noise.draw(ecomodel::Equation::E));
    result.nevi_after = timeline.nevi(timeline.after_row());
    result.after = ecomodel::evaluate_indicators(timeline.inputs(timeline.after_row()), k, &noise);
    result.efficiency_after =
        ecomodel::nev_efficiency(result.after, result.nevi_after, k.w, noise.draw(ecomodel::Equation::E));
  });

  in_stage("efficiency", [&] {
    result.delta_nev_population = delta_population;
    result.delta_nev_efficiency = result.efficiency_after - result.efficiency_before;
    try {
      result.standardized_growth = ecomodel::standardize(delta_population, delta_population);
      result.standardized_efficiency = ecomodel::standardize(result.delta_nev_efficiency, delta_population);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateDenominator) throw;
      result.notes.push_back(fmt::format("standardization unavailable: {}", e.what()));
    }
  });
  return run;
}

void write_outputs(const ScenarioRun& run, const std::filesystem::path& out_dir) {
  std::map<std::filesystem::path, std::string> files;
  for (auto format : {ReportFormat::Json, ReportFormat::Csv, ReportFormat::Table}) {
    files[fmt::format("report.{}", extension(format))] = render_report(run.result, format);
  }
  const auto plots = emit_plots(run.result, run.archive);
  for (const auto& p : plots.files) files[std::filesystem::path("plots") / p.name] = p.svg;
  if (!plots.notes.empty()) {
    std::string text;
    for (const auto& n : plots.notes) text += n + "\n";
    files[std::filesystem::path("plots") / "notes.txt"] = text;
  }
  files["anomalies.csv"] = anomalies_csv(run.anomalies);
  files["profiles.csv"] = profiles_csv(run.profiles);
  for (const auto& m : run.models) {
    files[std::filesystem::path("models") / (m.series + ".json")] = model_to_json(m.model);
  }
  for (const auto& f : run.result.forecasts) {
    std::string loss = "epoch,mse\n";
    for (std::size_t e = 0; e < f.diagnostics.loss_curve.size(); ++e) {
      loss += fmt::format("{},{}\n", e, f.diagnostics.loss_curve[e]);
    }
    files[std::filesystem::path("models") / (f.series + ".loss.csv")] = loss;
  }

  for (const auto& [rel, content] : files) {
    const auto path = out_dir / rel;
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path.string()));
  }
}

}  // namespace nevsim::scenario
