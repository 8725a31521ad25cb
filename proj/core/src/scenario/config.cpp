#include "nevsim/scenario/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "nevsim/error.hpp"

namespace nevsim::scenario {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::Config, "config: " + what); }

const json* find(const json& obj, std::string_view key) {
  if (!obj.is_object()) return nullptr;
  const auto it = obj.find(std::string(key));
  return it == obj.end() ? nullptr : &*it;
}

double read_number(const json& obj, std::string_view key, double fallback) {
  const auto* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) config_error(fmt::format("'{}' must be a number", key));
  const double x = v->get<double>();
  if (!std::isfinite(x)) config_error(fmt::format("'{}' must be finite", key));
  return x;
}

std::int64_t read_int(const json& obj, std::string_view key, std::int64_t fallback) {
  const auto* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) config_error(fmt::format("'{}' must be an integer", key));
  return v->get<std::int64_t>();
}

const json& read_object(const json& obj, std::string_view key) {
  static const json kEmpty = json::object();
  const auto* v = find(obj, key);
  if (!v) return kEmpty;
  if (!v->is_object()) config_error(fmt::format("'{}' must be an object", key));
  return *v;
}

template <std::size_t N>
std::array<double, N> read_array(const json& v, std::string_view key) {
  if (!v.is_array() || v.size() != N) config_error(fmt::format("'{}' must be an array of {} numbers", key, N));
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!v[i].is_number()) config_error(fmt::format("'{}[{}]' must be a number", key, i));
    out[i] = v[i].get<double>();
    if (!std::isfinite(out[i])) config_error(fmt::format("'{}[{}]' must be finite", key, i));
  }
  return out;
}

ecomodel::IndicatorInputs read_inputs(const json& obj, std::string_view where, ecomodel::IndicatorInputs base) {
  if (!obj.is_object()) config_error(fmt::format("'{}' must be an object", where));
  for (const auto& [key, value] : obj.items()) {
    double* field = ecomodel::input_field(base, key);
    if (!field) config_error(fmt::format("unknown input '{}.{}'", where, key));
    if (!value.is_number()) config_error(fmt::format("'{}.{}' must be a number", where, key));
    *field = value.get<double>();
  }
  try {
    ecomodel::validate(base);
  } catch (const Error& e) {
    config_error(fmt::format("{}: {}", where, e.what()));
  }
  return base;
}

forecast::IntRange read_int_range(const json& obj, std::string_view key, forecast::IntRange fallback) {
  const auto* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number_integer() || !(*v)[1].is_number_integer()) {
    config_error(fmt::format("'forecast.search_space.{}' must be [lower, upper] integers", key));
  }
  forecast::IntRange r{(*v)[0].get<int>(), (*v)[1].get<int>()};
  if (r.lower < 1 || r.upper < r.lower) config_error(fmt::format("'forecast.search_space.{}' is empty", key));
  return r;
}

forecast::RealRange read_real_range(const json& obj, std::string_view key, forecast::RealRange fallback) {
  const auto* v = find(obj, key);
  if (!v) return fallback;
  const auto a = read_array<2>(*v, key);
  if (a[0] <= 0.0 || a[1] < a[0]) config_error(fmt::format("'forecast.search_space.{}' is empty", key));
  return {a[0], a[1]};
}

void read_telemetry(const json& root, const std::filesystem::path& base_dir, TelemetrySource& out) {
  const auto* t = find(root, "telemetry");
  if (!t) return;
  if (t->is_string() || t->is_array()) {
    const json paths = t->is_string() ? json::array({*t}) : *t;
    for (const auto& p : paths) {
      if (!p.is_string()) config_error("'telemetry' paths must be strings");
      std::filesystem::path path = p.get<std::string>();
      out.paths.push_back(path.is_relative() ? base_dir / path : path);
    }
    return;
  }
  if (!t->is_object()) config_error("'telemetry' must be a path, a list of paths or an object");
  if (const auto* paths = find(*t, "paths")) {
    if (!paths->is_array()) config_error("'telemetry.paths' must be an array");
    for (const auto& p : *paths) {
      if (!p.is_string()) config_error("'telemetry.paths' entries must be strings");
      std::filesystem::path path = p.get<std::string>();
      out.paths.push_back(path.is_relative() ? base_dir / path : path);
    }
  }
  if (const auto* syn = find(*t, "synthetic")) {
    if (!syn->is_object()) config_error("'telemetry.synthetic' must be an object");
    fleet::FleetSpec spec;
    spec.vehicles = static_cast<int>(read_int(*syn, "vehicles", spec.vehicles));
    spec.days = static_cast<int>(read_int(*syn, "days", spec.days));
    spec.start = read_int(*syn, "start", spec.start);
    spec.drive_sample_s = static_cast<int>(read_int(*syn, "drive_sample_s", spec.drive_sample_s));
    spec.charge_sample_s = static_cast<int>(read_int(*syn, "charge_sample_s", spec.charge_sample_s));
    spec.seed = static_cast<std::uint64_t>(read_int(*syn, "seed", static_cast<std::int64_t>(spec.seed)));
    spec.inject_immediate_shutdowns =
        static_cast<int>(read_int(*syn, "inject_immediate_shutdowns", spec.inject_immediate_shutdowns));
    spec.inject_fuel_while_charging =
        static_cast<int>(read_int(*syn, "inject_fuel_while_charging", spec.inject_fuel_while_charging));
    if (spec.vehicles < 1 || spec.days < 1 || spec.drive_sample_s < 1 || spec.charge_sample_s < 1) {
      config_error("'telemetry.synthetic' sizes must be positive");
    }
    out.synthetic = spec;
  }
}

void read_coefficients(const json& root, ScenarioConfig& cfg) {
  const auto& c = read_object(root, "coefficients");
  auto& k = cfg.coefficients;
  for (const auto& [key, value] : c.items()) {
    std::size_t group = kCoefficientGroupCount;
    for (std::size_t g = 0; g < kCoefficientGroupCount; ++g) {
      if (kCoefficientGroupNames[g] == key) group = g;
    }
    const auto where = "coefficients." + key;
    switch (static_cast<CoefficientGroup>(group)) {
      case CoefficientGroup::L: k.l = read_array<4>(value, where); break;
      case CoefficientGroup::GPc: k.g_pc = read_array<4>(value, where); break;
      case CoefficientGroup::C: k.c = read_array<2>(value, where); break;
      case CoefficientGroup::D: k.d = read_array<3>(value, where); break;
      case CoefficientGroup::E: k.e = read_array<2>(value, where); break;
      case CoefficientGroup::GLsbct: k.g_lsbct = read_array<3>(value, where); break;
      case CoefficientGroup::W: k.w = read_array<7>(value, where); break;
      default: config_error(fmt::format("unknown coefficient group '{}'", key));
    }
    cfg.coefficients_given[group] = true;
  }

  const auto& noise = read_object(root, "noise");
  for (const auto& [key, value] : noise.items()) {
    std::size_t eq = ecomodel::kEquationCount;
    for (std::size_t i = 0; i < ecomodel::kEquationCount; ++i) {
      if (ecomodel::to_string(static_cast<ecomodel::Equation>(i)) == key) eq = i;
    }
    if (eq == ecomodel::kEquationCount) config_error(fmt::format("unknown noise term '{}'", key));
    if (!value.is_number() || !(value.get<double>() >= 0.0) || !std::isfinite(value.get<double>())) {
      config_error(fmt::format("'noise.{}' must be a nonnegative number", key));
    }
    k.noise_sigma[eq] = value.get<double>();
  }
}

void read_drivers(const json& root, ScenarioConfig& cfg) {
  const auto* d = find(root, "drivers");
  if (!d) return;
  if (!d->is_array()) config_error("'drivers' must be an array");
  cfg.drivers.clear();
  for (const auto& m : *d) {
    if (!m.is_object()) config_error("'drivers' entries must be objects");
    DriverMapping map;
    const auto* series = find(m, "series");
    const auto* target = find(m, "target");
    if (!series || !series->is_string() || !target || !target->is_string()) {
      config_error("'drivers' entries need string 'series' and 'target'");
    }
    map.series = series->get<std::string>();
    map.target = target->get<std::string>();
    bool known = false;
    for (auto name : kDriverSeries) known = known || name == map.series;
    if (!known) config_error(fmt::format("unknown driver series '{}'", map.series));
    ecomodel::IndicatorInputs probe;
    if (!ecomodel::input_field(probe, map.target) || map.target == "nevi") {
      config_error(fmt::format("driver target '{}' is not a mappable input", map.target));
    }
    map.offset = read_number(m, "offset", 0.0);
    map.scale = read_number(m, "scale", 1.0);
    if (const auto* co2 = find(m, "via_co2")) {
      if (!co2->is_boolean()) config_error("'drivers[].via_co2' must be a boolean");
      map.via_co2 = co2->get<bool>();
    }
    cfg.drivers.push_back(std::move(map));
  }
}

}  // namespace

std::vector<DriverMapping> default_driver_mappings() {
  return {
      {"soc_stress", "charging_behavior", 0.0, 1.0, false},
      {"high_speed_fraction", "driving_speed", 60.0, 60.0, false},
      {"energy_kwh", "c_traffic", 0.0, 1e-4, true},
  };
}

ScenarioConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    config_error(fmt::format("malformed JSON: {}", e.what()));
  }
  if (!root.is_object()) config_error("top level must be an object");

  ScenarioConfig cfg;
  read_telemetry(root, base_dir, cfg.telemetry);
  cfg.horizon = static_cast<int>(read_int(root, "horizon", cfg.horizon));
  if (cfg.horizon < 0) config_error("'horizon' must be >= 0");
  cfg.nev_population = read_number(root, "nev_population", cfg.nev_population);
  if (cfg.nev_population < 0.0 || cfg.nev_population > 1.0) config_error("'nev_population' must lie in [0, 1]");
  cfg.delta_nev_population = read_number(root, "delta_nev_population", cfg.delta_nev_population);
  cfg.seed = static_cast<std::uint64_t>(read_int(root, "seed", 0));
  if (const auto* out = find(root, "out")) {
    if (!out->is_string()) config_error("'out' must be a string");
    cfg.out_dir = out->get<std::string>();
  }

  const auto& b = read_object(root, "behavior");
  cfg.profile.high_soc = read_number(b, "high_soc", cfg.profile.high_soc);
  cfg.profile.low_soc = read_number(b, "low_soc", cfg.profile.low_soc);
  cfg.profile.high_speed_kmh = read_number(b, "high_speed_kmh", cfg.profile.high_speed_kmh);
  cfg.anomaly.min_session_s = read_int(b, "min_session_s", cfg.anomaly.min_session_s);
  cfg.anomaly.min_mode_dwell_s = read_int(b, "min_mode_dwell_s", cfg.anomaly.min_mode_dwell_s);
  cfg.anomaly.max_gap_s = read_int(b, "max_gap_s", cfg.anomaly.max_gap_s);
  if (cfg.anomaly.min_session_s < 0 || cfg.anomaly.min_mode_dwell_s < 0 || cfg.anomaly.max_gap_s < 0) {
    config_error("'behavior' durations must be nonnegative");
  }

  const auto& cb = read_object(root, "charging_behavior");
  cfg.overcharge_weight = read_number(cb, "overcharge_weight", cfg.overcharge_weight);
  cfg.deep_discharge_weight = read_number(cb, "deep_discharge_weight", cfg.deep_discharge_weight);

  cfg.bucket_s = read_int(root, "bucket_s", cfg.bucket_s);
  if (cfg.bucket_s < 1) config_error("'bucket_s' must be positive");

  const auto& f = read_object(root, "forecast");
  cfg.forecast.budget = static_cast<int>(read_int(f, "budget", cfg.forecast.budget));
  if (cfg.forecast.budget < 3) config_error("'forecast.budget' must be at least 3");
  cfg.forecast.split = read_number(f, "split", cfg.forecast.split);
  if (!(cfg.forecast.split > 0.0 && cfg.forecast.split < 1.0)) config_error("'forecast.split' must lie in (0, 1)");
  const auto& space = read_object(f, "search_space");
  cfg.forecast.space.hidden_size = read_int_range(space, "hidden_size", cfg.forecast.space.hidden_size);
  cfg.forecast.space.learning_rate = read_real_range(space, "learning_rate", cfg.forecast.space.learning_rate);
  cfg.forecast.space.window = read_int_range(space, "window", cfg.forecast.space.window);
  cfg.forecast.space.epochs = read_int_range(space, "epochs", cfg.forecast.space.epochs);

  cfg.inputs = read_inputs(read_object(root, "inputs"), "inputs", cfg.inputs);
  read_coefficients(root, cfg);
  cfg.grid_factor_kg_per_kwh = read_number(root, "grid_factor_kg_per_kwh", cfg.grid_factor_kg_per_kwh);
  if (cfg.grid_factor_kg_per_kwh < 0.0) config_error("'grid_factor_kg_per_kwh' must be nonnegative");
  read_drivers(root, cfg);

  if (const auto* fx = find(root, "fixture")) {
    if (!fx->is_object()) config_error("'fixture' must be an object");
    const auto* before = find(*fx, "inputs_before");
    const auto* after = find(*fx, "inputs_after");
    if (!before || !after) config_error("'fixture' needs 'inputs_before' and 'inputs_after'");
    cfg.fixture = FixtureInputs{read_inputs(*before, "fixture.inputs_before", cfg.inputs),
                                read_inputs(*after, "fixture.inputs_after", cfg.inputs)};
  } else if (cfg.telemetry.paths.empty() && !cfg.telemetry.synthetic) {
    config_error("'telemetry' is required unless a 'fixture' is given");
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, fmt::format("config: cannot read '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str(), path.parent_path());
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, fmt::format("{} ({})", e.what(), path.string()));
  }
}

}  // namespace nevsim::scenario
