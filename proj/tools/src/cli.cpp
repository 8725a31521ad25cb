#include "nevsim/cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "nevsim/error.hpp"
#include "nevsim/fleet.hpp"
#include "nevsim/random.hpp"
#include "nevsim/scenario/config.hpp"
#include "nevsim/scenario/pipeline.hpp"
#include "nevsim/scenario/report.hpp"
#include "nevsim/scenario/serialize.hpp"

namespace nevsim::cli {

namespace {

using nlohmann::json;
using scenario::ReportFormat;

struct Globals {
  std::string config;
  std::int64_t seed = 0;
  bool seed_given = false;
  std::string out;
  std::string format = "table";
};

std::string fmt_number(double v) { return scenario::format_value(v); }
std::string fmt_optional(const std::optional<double>& v) { return v ? fmt_number(*v) : "n/a"; }
json json_optional(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

scenario::ScenarioConfig resolve(const Globals& g, const std::vector<std::string>& files) {
  scenario::ScenarioConfig cfg;
  if (!g.config.empty()) cfg = scenario::load_config(g.config);
  if (!files.empty()) {
    cfg.telemetry.paths.assign(files.begin(), files.end());
    cfg.telemetry.synthetic.reset();
    cfg.fixture.reset();
  }
  if (g.seed_given) cfg.seed = static_cast<std::uint64_t>(g.seed);
  if (!g.out.empty()) cfg.out_dir = g.out;
  return cfg;
}

void require_telemetry(const scenario::ScenarioConfig& cfg) {
  if (cfg.telemetry.paths.empty() && !cfg.telemetry.synthetic) {
    throw Error(ErrorCode::Config, "no telemetry: pass CSV files or a --config with a telemetry source");
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f << content;
  if (!f) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path.string()));
}

ReportFormat format_of(const Globals& g) { return *scenario::parse_report_format(g.format); }

int cmd_ingest(const Globals& g, const std::vector<std::string>& files, std::ostream& out) {
  const auto cfg = resolve(g, files);
  require_telemetry(cfg);
  const auto data = scenario::load_telemetry(cfg.telemetry);
  switch (format_of(g)) {
    case ReportFormat::Json: {
      json rejections = json::array();
      for (const auto& r : data.rejections) rejections.push_back({{"row", r.row}, {"reason", r.reason}});
      json violations = json::array();
      for (const auto& v : data.violations) {
        violations.push_back({{"index", v.index}, {"code", telemetry::to_string(v.code)}});
      }
      out << json{{"accepted", data.records.size()},
                  {"rejected", data.rejections.size()},
                  {"rejections", rejections},
                  {"stream_violations", violations}}
                 .dump(2)
          << "\n";
      break;
    }
    case ReportFormat::Csv:
      out << "row,reason\n";
      for (const auto& r : data.rejections) out << r.row << ',' << r.reason << '\n';
      break;
    case ReportFormat::Table:
      out << fmt::format("accepted  {}\nrejected  {}\nstream violations  {}\n", data.records.size(),
                         data.rejections.size(), data.violations.size());
      for (const auto& r : data.rejections) out << fmt::format("  row {}: {}\n", r.row, r.reason);
      break;
  }
  return kSuccess;
}

int cmd_analyze(const Globals& g, const std::vector<std::string>& files, std::ostream& out) {
  const auto cfg = resolve(g, files);
  require_telemetry(cfg);
  const auto data = scenario::load_telemetry(cfg.telemetry);
  const auto anomalies = behavior::detect_fleet_anomalies(data.records, cfg.anomaly);
  const auto profiles = behavior::build_fleet_profiles(data.records, cfg.profile);
  const auto hybrid = behavior::hybrid_vehicle_records(data.records);
  const auto correlations = behavior::correlation_report(data.records);
  const auto hybrid_correlations =
      hybrid.empty() ? behavior::CorrelationReport{} : behavior::correlation_report(hybrid);

  if (!g.out.empty()) {
    write_file(std::filesystem::path(g.out) / "anomalies.csv", scenario::anomalies_csv(anomalies));
    write_file(std::filesystem::path(g.out) / "profiles.csv", scenario::profiles_csv(profiles));
  }

  auto corr_json = [](const behavior::CorrelationReport& c) {
    json pairs = json::array();
    for (const auto& p : c.pairs) pairs.push_back({{"a", p.a}, {"b", p.b}, {"r", p.r}, {"samples", p.samples}});
    json omitted = json::array();
    for (const auto& o : c.omitted) omitted.push_back({{"a", o.a}, {"b", o.b}, {"reason", o.reason}});
    return json{{"pairs", pairs}, {"omitted", omitted}};
  };

  switch (format_of(g)) {
    case ReportFormat::Json: {
      json a = json::array();
      for (const auto& x : anomalies) {
        a.push_back({{"vehicle_id", x.vehicle_id},
                     {"datetime", telemetry::format_timestamp(x.at)},
                     {"class", behavior::to_string(x.anomaly_class)},
                     {"code", behavior::to_string(x.detail)}});
      }
      json p = json::array();
      for (const auto& x : profiles) {
        p.push_back({{"vehicle_id", x.vehicle_id},
                     {"overcharge_rate", x.overcharge_rate},
                     {"deep_discharge_rate", x.deep_discharge_rate},
                     {"high_speed_fraction", x.high_speed_fraction},
                     {"mode_switch_count", x.mode_switch_count},
                     {"pure_electric_share", x.pure_electric_share},
                     {"charge_while_driving_share", x.charge_while_driving_share}});
      }
      out << json{{"records", data.records.size()},
                  {"anomalies", a},
                  {"profiles", p},
                  {"correlations", corr_json(correlations)},
                  {"hybrid_correlations", corr_json(hybrid_correlations)}}
                 .dump(2)
          << "\n";
      break;
    }
    case ReportFormat::Csv:
      out << scenario::anomalies_csv(anomalies) << '\n' << scenario::profiles_csv(profiles);
      break;
    case ReportFormat::Table: {
      out << fmt::format("records  {}\nvehicles  {}\nanomalies  {}\n", data.records.size(), profiles.size(),
                         anomalies.size());
      for (const auto& x : anomalies) {
        out << fmt::format("  {}  {}  {}\n", x.vehicle_id, telemetry::format_timestamp(x.at),
                           behavior::to_string(x.detail));
      }
      out << "\nprofiles\n";
      for (const auto& p : profiles) {
        out << fmt::format("  {}  overcharge {}  deep discharge {}  high speed {}  switches {}\n", p.vehicle_id,
                           fmt_number(p.overcharge_rate), fmt_number(p.deep_discharge_rate),
                           fmt_number(p.high_speed_fraction), p.mode_switch_count);
      }
      auto print = [&](std::string_view title, const behavior::CorrelationReport& c) {
        out << '\n' << title << '\n';
        for (const auto& p : c.pairs) out << fmt::format("  {} vs {}  r = {:.4f}  (n = {})\n", p.a, p.b, p.r, p.samples);
        for (const auto& o : c.omitted) out << fmt::format("  {} vs {}  omitted: {}\n", o.a, o.b, o.reason);
      };
      print("correlations", correlations);
      if (!hybrid.empty()) print("correlations (hybrid vehicles)", hybrid_correlations);
      break;
    }
  }
  return kSuccess;
}

int cmd_train(const Globals& g, const std::vector<std::string>& files, std::ostream& out) {
  const auto cfg = resolve(g, files);
  require_telemetry(cfg);
  const auto data = scenario::load_telemetry(cfg.telemetry);
  const auto archive = scenario::driver_series(data.records, cfg);

  json report = json::array();
  std::string table;
  std::string csv = "series,hidden_size,learning_rate,window,epochs,validation_mse,r2_test,mse_test,mse_ratio\n";
  for (const auto& s : archive) {
    const auto tuning = forecast::bayes_optimize(s.values, cfg.forecast.space, cfg.forecast.budget,
                                                 derive_seed(cfg.seed, "forecast/" + s.name), cfg.forecast.split);
    const auto fit = forecast::train(s.values, tuning.best, cfg.forecast.split);
    const auto& d = fit.diagnostics;
    const auto& hp = tuning.best;
    if (!g.out.empty()) {
      write_file(std::filesystem::path(g.out) / "models" / (s.name + ".json"), scenario::model_to_json(fit.model));
    }
    report.push_back({{"series", s.name},
                      {"points", s.values.size()},
                      {"best",
                       {{"hidden_size", hp.hidden_size},
                        {"learning_rate", hp.learning_rate},
                        {"window", hp.window},
                        {"epochs", hp.epochs}}},
                      {"validation_mse", tuning.best_validation_mse},
                      {"r2_train", json_optional(d.r2_train)},
                      {"r2_test", json_optional(d.r2_test)},
                      {"mse_train", d.mse_train},
                      {"mse_test", d.mse_test},
                      {"mse_ratio", json_optional(d.mse_ratio)}});
    csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", s.name, hp.hidden_size, hp.learning_rate, hp.window, hp.epochs,
                       tuning.best_validation_mse, d.r2_test ? fmt::format("{}", *d.r2_test) : "",
                       d.mse_test, d.mse_ratio ? fmt::format("{}", *d.mse_ratio) : "");
    table += fmt::format(
        "{}  ({} points)\n  hidden {}  learning rate {}  window {}  epochs {}\n"
        "  R2 train {}  R2 test {}  MSE train {}  MSE test {}  ratio {}\n",
        s.name, s.values.size(), hp.hidden_size, fmt_number(hp.learning_rate), hp.window, hp.epochs,
        fmt_optional(d.r2_train), fmt_optional(d.r2_test), fmt_number(d.mse_train), fmt_number(d.mse_test),
        fmt_optional(d.mse_ratio));
  }
  switch (format_of(g)) {
    case ReportFormat::Json: out << report.dump(2) << "\n"; break;
    case ReportFormat::Csv: out << csv; break;
    case ReportFormat::Table: out << table; break;
  }
  return kSuccess;
}

int cmd_simulate(const Globals& g, std::ostream& out) {
  if (g.config.empty()) throw Error(ErrorCode::Config, "simulate requires --config");
  const auto cfg = resolve(g, {});
  const auto run = scenario::run_scenario(cfg);
  scenario::write_outputs(run, cfg.out_dir);
  out << scenario::render_report(run.result, format_of(g));
  return kSuccess;
}

int cmd_report(const Globals& g, const std::string& source, std::ostream& out) {
  std::filesystem::path path = source;
  if (std::filesystem::is_directory(path)) path /= "report.json";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto result = scenario::result_from_json(buffer.str());
  const auto text = scenario::render_report(result, format_of(g));
  if (!g.out.empty()) {
    write_file(std::filesystem::path(g.out) / fmt::format("report.{}", scenario::extension(format_of(g))), text);
  }
  out << text;
  return kSuccess;
}

int cmd_generate(const Globals& g, fleet::FleetSpec spec, std::ostream& out) {
  if (g.seed_given) spec.seed = static_cast<std::uint64_t>(g.seed);
  const auto trace = fleet::generate_fleet(spec);
  std::ostringstream csv;
  telemetry::write_telemetry_csv(csv, trace.records);
  if (g.out.empty()) {
    out << csv.str();
  } else {
    write_file(g.out, csv.str());
    out << fmt::format("wrote {} records to {}\n", trace.records.size(), g.out);
  }
  return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Telemetry analytics and urban-ecology scenario simulation for new energy vehicles", "nevsim"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "Scenario config (JSON)");
  auto* seed = app.add_option("--seed", g.seed, "Master seed, overrides the config");
  app.add_option("--out", g.out, "Output directory (file for generate)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv", "table"}));

  std::vector<std::string> files;
  auto* ingest = app.add_subcommand("ingest", "Validate and ingest telemetry CSV");
  ingest->add_option("files", files, "Telemetry CSV files (default: config telemetry)");
  auto* analyze = app.add_subcommand("analyze", "Behavior profiles, anomalies and SOC correlations");
  analyze->add_option("files", files, "Telemetry CSV files (default: config telemetry)");
  auto* train = app.add_subcommand("train", "Tune and fit a forecaster per driver series");
  train->add_option("files", files, "Telemetry CSV files (default: config telemetry)");
  auto* simulate = app.add_subcommand("simulate", "Run the full scenario and write the output tree");
  std::string report_source;
  auto* report = app.add_subcommand("report", "Re-render a saved report.json");
  report->add_option("source", report_source, "report.json or an output directory")->required();

  fleet::FleetSpec spec;
  auto* generate = app.add_subcommand("generate", "Write a synthetic fleet as telemetry CSV");
  generate->add_option("--vehicles", spec.vehicles, "Number of vehicles")->check(CLI::PositiveNumber);
  generate->add_option("--days", spec.days, "Days of operation")->check(CLI::PositiveNumber);
  generate->add_option("--inject-shutdowns", spec.inject_immediate_shutdowns, "Injected immediate shutdowns")
      ->check(CLI::NonNegativeNumber);
  generate->add_option("--inject-fuel", spec.inject_fuel_while_charging, "Injected fuel-mode charging records")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kConfigError;
  }
  g.seed_given = seed->count() > 0;

  try {
    if (*ingest) return cmd_ingest(g, files, out);
    if (*analyze) return cmd_analyze(g, files, out);
    if (*train) return cmd_train(g, files, out);
    if (*simulate) return cmd_simulate(g, out);
    if (*report) return cmd_report(g, report_source, out);
    if (*generate) return cmd_generate(g, spec, out);
  } catch (const Error& e) {
    err << "nevsim: " << e.what() << '\n';
    return e.code() == ErrorCode::Config ? kConfigError : kDataError;
  } catch (const std::exception& e) {
    err << "nevsim: " << e.what() << '\n';
    return kDataError;
  }
  return kSuccess;
}

}  // namespace nevsim::cli
