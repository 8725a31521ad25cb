// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Every tolerance is pinned below.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "gradcheck.hpp"
#include "nevsim/behavior.hpp"
#include "nevsim/cli.hpp"
#include "nevsim/ecomodel.hpp"
#include "nevsim/fleet.hpp"
#include "nevsim/forecast/bayes_opt.hpp"
#include "nevsim/forecast/trainer.hpp"
#include "nevsim/random.hpp"
#include "nevsim/scenario/config.hpp"
#include "nevsim/scenario/pipeline.hpp"
#include "nevsim/scenario/report.hpp"
#include "nevsim/weighting.hpp"

namespace fs = std::filesystem;
using namespace nevsim;

namespace {

// Pinned tolerances and sizes.
constexpr double kStandardizeTol = 1e-4;
constexpr int kGradConfigs = 150;
constexpr double kGradRelTol = 1e-4;
constexpr double kGradStep = 1e-6;
constexpr int kSeriesLength = 400;
constexpr int kForecastBudget = 25;
constexpr double kR2Threshold = 0.99;
constexpr int kBayesBudget = 20;
constexpr double kBayesTol = 0.05;
constexpr int kBayesSeeds = 10;
constexpr int kBayesRandomDraws = 20;
constexpr int kBayesMinWins = 8;
constexpr double kEwmWeightTol = 1e-9;
constexpr double kEwmEntropyTol = 1e-3;
constexpr double kEwmEntropyExpected = 0.9206;
constexpr int kEwmRandomMatrices = 1000;
constexpr double kMinAbsCorrelation = 0.3;
constexpr double kLinearityTol = 1e-11;  // relative to max(1, |terms|)
constexpr int kNoiseDraws = 10000;
constexpr double kNoiseSdTol = 0.05;

struct Outcome {
  bool pass = false;
  std::string detail;
};

const fs::path kSource = NEVSIM_SOURCE_DIR;

// 1
Outcome standardization_identity() {
  const double growth = ecomodel::standardize(0.001321, 0.001321);
  const double efficiency = ecomodel::standardize(-0.004252, 0.001321);
  return {growth == 1.0 && std::abs(efficiency - -3.21877) <= kStandardizeTol,
          fmt::format("growth {} efficiency {:.8f}", growth, efficiency)};
}

// 2
std::vector<std::string> cells(const std::string& line) {
  static const std::regex gap(" {2,}");
  std::vector<std::string> out;
  for (std::sregex_token_iterator it(line.begin(), line.end(), gap, -1), end; it != end; ++it) {
    if (!it->str().empty()) out.push_back(*it);
  }
  return out;
}

Outcome fixture_tables() {
  const auto run = scenario::run_scenario(scenario::load_config(kSource / "configs" / "paper_fixture.json"));
  const auto table = scenario::render_table(run.result);
  const std::vector<std::vector<std::string>> expected{
      {"Indicator", "Before Simulation", "After Simulation"},
      {"Land Degradation (LD)", "3.22", "3.53"},
      {"Pollutant Concentration (PC) – SO₂", "0.04 mg/m³", "0.07 mg/m³"},
      {"Climate Change Impact (CCI)", "0.21 °C", "0.32 °C"},
      {"Forest Restoration (FR)", "0.32%", "0.26%"},
      {"Waste Treatment Rate (WTR)", "20.3%", "15.5%"},
      {"Lithium Sulfur Battery Chemical Toxicity (LSBCT)", "4", "4"},
      {"Indicator", "Values", "Standardization"},
      {"NEV Growth (Δ NEV Population)", "0.001321", "1"},
      {"Δ NEV Efficiency", "-0.004252", "-3.21877"},
  };
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(table);
  for (std::string line; std::getline(in, line);) {
    auto c = cells(line);
    if (c.size() == 3) rows.push_back(std::move(c));
  }
  if (rows != expected) return {false, "table rows differ:\n" + table};
  return {true, "10 rows, 26 cells byte-exact"};
}

// 3
Outcome gradient_oracle() {
  std::mt19937_64 rng(20240501);
  double worst = 0.0;
  for (int config = 0; config < kGradConfigs; ++config) {
    const std::size_t h = 1 + rng() % 4;
    const std::size_t steps = 1 + rng() % 10;
    auto params = forecast::LstmParams::random(1, h, rng());
    const double spread = uniform(rng, 0.5, 2.5);
    for (auto& v : params.values()) v *= spread;
    std::vector<double> window(steps);
    for (auto& x : window) x = uniform(rng, -1.0, 1.0);
    const double target = uniform(rng, -1.0, 1.0);
    worst = std::max(worst, gradcheck::max_gradient_error(params, window, target, kGradStep));
  }
  return {worst < kGradRelTol, fmt::format("{} configurations, max relative error {:.3g}", kGradConfigs, worst)};
}

// 4
Outcome forecast_quality() {
  std::vector<double> series(kSeriesLength);
  for (int t = 0; t < kSeriesLength; ++t) series[t] = std::sin(2 * std::numbers::pi * t / 40.0) + 0.002 * t;
  const auto n_train = static_cast<std::size_t>(0.8 * kSeriesLength);

  // Tuning only sees the training share; its own validation split lies inside it.
  forecast::HyperparamSpace space;
  space.hidden_size = {4, 16};
  space.learning_rate = {1e-3, 1e-1};
  space.window = {4, 16};
  space.epochs = {100, 300};
  const auto tuning = forecast::bayes_optimize(std::span(series).first(n_train), space, kForecastBudget, 1);
  const auto fit = forecast::train(series, tuning.best, 0.8);
  const auto& d = fit.diagnostics;
  const double r2 = d.r2_test.value_or(-std::numeric_limits<double>::infinity());
  const bool pass = r2 >= kR2Threshold && std::isfinite(d.mse_test);
  return {pass, fmt::format("r2_test {:.6f} r2_train {:.6f} mse_test {:.3g} mse_train {:.3g} ratio {:.3f} "
                            "(hidden {} lr {:.4g} window {} epochs {})",
                            r2, d.r2_train.value_or(NAN), d.mse_test, d.mse_train, d.mse_ratio.value_or(NAN),
                            tuning.best.hidden_size, tuning.best.learning_rate, tuning.best.window,
                            tuning.best.epochs)};
}

// 5
Outcome bayes_sanity() {
  auto f = [](std::span<const double> x) { return (x[0] - 0.3) * (x[0] - 0.3); };
  double oracle_x = 0.0, oracle_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 100000; ++i) {
    const double x = i / 100000.0;
    if (const double v = f(std::span(&x, 1)); v < oracle_f) oracle_f = v, oracle_x = x;
  }
  const forecast::SearchSpace box{{forecast::SearchDim{"x", 0.0, 1.0}}};
  int near = 0, wins = 0;
  double worst_distance = 0.0;
  for (std::uint64_t seed = 1; seed <= kBayesSeeds; ++seed) {
    const auto r = forecast::bayes_minimize(box, f, kBayesBudget, seed);
    const double distance = std::abs(r.best_point[0] - oracle_x);
    worst_distance = std::max(worst_distance, distance);
    near += distance <= kBayesTol;

    std::mt19937_64 rng(seed);
    double random_best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kBayesRandomDraws; ++i) {
      const double x = uniform(rng);
      random_best = std::min(random_best, f(std::span(&x, 1)));
    }
    wins += r.best_value <= random_best;
  }
  return {near == kBayesSeeds && wins >= kBayesMinWins,
          fmt::format("oracle x* = {}, max |x - x*| {:.4f} ({}/{} within {}), beats random in {}/{} seeds", oracle_x,
                      worst_distance, near, kBayesSeeds, kBayesTol, wins, kBayesSeeds)};
}

// 6
Outcome ewm_oracle() {
  // e_A by direct evaluation: p = (1/6, 2/6, 3/6), e = -(1/ln 3) sum p ln p.
  double e_a = 0.0;
  for (double x : {1.0, 2.0, 3.0}) e_a -= (x / 6.0) * std::log(x / 6.0);
  e_a /= std::log(3.0);
  const auto w = weighting::entropy_weights(3, 2, std::vector<double>{1, 2, 2, 2, 3, 2});
  bool pass = std::abs(w.weights[0] - 1.0) <= kEwmWeightTol && std::abs(w.weights[1]) <= kEwmWeightTol &&
              std::abs(w.entropies[0] - e_a) <= kEwmEntropyTol &&
              std::abs(w.entropies[0] - kEwmEntropyExpected) <= kEwmEntropyTol;

  std::mt19937_64 rng(6);
  int violations = 0;
  for (int trial = 0; trial < kEwmRandomMatrices; ++trial) {
    const std::size_t n = 2 + rng() % 10, m = 1 + rng() % 8;
    std::vector<double> x(n * m);
    for (auto& v : x) v = uniform(rng, 0.0, 10.0);
    const auto base = weighting::entropy_weights(n, m, x);
    const double sum = std::accumulate(base.weights.begin(), base.weights.end(), 0.0);
    bool ok = std::abs(sum - 1.0) <= kEwmWeightTol;
    for (double v : base.weights) ok &= v >= 0.0;
    const std::size_t j = rng() % m;
    const double alpha = uniform(rng, 0.01, 100.0);
    for (std::size_t i = 0; i < n; ++i) x[i * m + j] *= alpha;
    const auto scaled = weighting::entropy_weights(n, m, x);
    for (std::size_t k = 0; k < m; ++k) ok &= std::abs(scaled.weights[k] - base.weights[k]) <= kEwmWeightTol;
    violations += !ok;
  }
  pass &= violations == 0;
  return {pass, fmt::format("weights [{:.12f}, {:.3g}], e_A {:.6f} vs oracle {:.6f}, {} of {} random matrices "
                            "violate sum/sign/scale",
                            w.weights[0], w.weights[1], w.entropies[0], e_a, violations, kEwmRandomMatrices)};
}

// 7
Outcome anomaly_exactness() {
  int mismatches = 0, total_injected = 0;
  for (auto [k, m] : {std::pair{0, 0}, {3, 4}, {1, 7}, {6, 0}, {0, 5}}) {
    fleet::FleetSpec spec;
    spec.days = 14;
    spec.seed = 100 + k * 10 + m;
    spec.inject_immediate_shutdowns = k;
    spec.inject_fuel_while_charging = m;
    const auto trace = fleet::generate_fleet(spec);
    std::vector<fleet::InjectedEvent> found;
    for (const auto& a : behavior::detect_fleet_anomalies(trace.records, {})) {
      if (a.anomaly_class != behavior::class_of(a.detail)) ++mismatches;
      found.push_back({a.vehicle_id, a.at, a.detail});
    }
    std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
      return std::tie(x.vehicle_id, x.at) < std::tie(y.vehicle_id, y.at);
    });
    if (found != trace.injected || trace.injected.size() != static_cast<std::size_t>(k + m)) ++mismatches;
    total_injected += k + m;
  }
  return {mismatches == 0, fmt::format("5 traces, {} injected events, {} mismatching traces", total_injected, mismatches)};
}

// 8
Outcome correlation_signs() {
  const auto trace = fleet::generate_fleet(fleet::FleetSpec{});
  const auto report = behavior::correlation_report(trace.records);
  std::string detail;
  bool pass = true;
  for (auto [name, sign] : {std::pair{"sum_voltage", 1}, {"sum_current", -1}, {"power", -1}, {"speed", -1},
                            {"trip_distance", -1}}) {
    const auto* p = report.find("soc", name);
    const double r = p ? p->r : 0.0;
    pass &= p != nullptr && r * sign >= kMinAbsCorrelation;
    detail += fmt::format("{}{} {:+.3f}", detail.empty() ? "" : ", ", name, r);
  }
  return {pass, detail};
}

// 9
std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), root).string()] = ss.str();
  }
  return out;
}

Outcome end_to_end_determinism() {
  const auto base = fs::temp_directory_path() / "nevsim_acceptance_determinism";
  fs::remove_all(base);
  const auto config = (kSource / "configs" / "synthetic_scenario.json").string();
  std::vector<std::map<std::string, std::string>> trees;
  for (const char* name : {"a", "b"}) {
    const auto out = (base / name).string();
    const std::vector<const char*> argv{"nevsim", "--config", config.c_str(), "--out", out.c_str(), "simulate"};
    std::ostringstream sink, err;
    if (const int code = cli::run(static_cast<int>(argv.size()), argv.data(), sink, err); code != 0) {
      return {false, fmt::format("simulate exited {}: {}", code, err.str())};
    }
    trees.push_back(read_tree(out));
  }
  fs::remove_all(base);
  std::size_t bytes = 0;
  for (const auto& [_, content] : trees[0]) bytes += content.size();
  return {trees[0] == trees[1] && !trees[0].empty(),
          fmt::format("{} files, {} bytes, trees {}", trees[0].size(), bytes,
                      trees[0] == trees[1] ? "identical" : "differ")};
}

// 10
Outcome linearity_and_noise() {
  using namespace ecomodel;
  std::mt19937_64 rng(10);
  auto random_inputs = [&] {
    IndicatorInputs in;
    for (auto name : kInputFieldNames) *input_field(in, name) = uniform(rng, -10.0, 10.0);
    return in;
  };
  auto close = [](double lhs, double a, double fa, double b, double fb) {
    const double scale = std::max({1.0, std::abs(a * fa), std::abs(b * fb)});
    return std::abs(lhs - (a * fa + b * fb)) <= kLinearityTol * scale;
  };
  int failures = 0;
  constexpr int kTrials = 2000;
  for (int trial = 0; trial < kTrials; ++trial) {
    CoefficientSet k;
    const std::array<std::span<double>, 7> groups{k.l, k.g_pc, k.c, k.d, k.e, k.g_lsbct, k.w};
    for (auto group : groups) {
      for (double& v : group) v = uniform(rng, -5.0, 5.0);
    }
    const auto x = random_inputs(), y = random_inputs();
    const double a = uniform(rng, -3.0, 3.0), b = uniform(rng, -3.0, 3.0);
    IndicatorInputs z;
    for (auto name : kInputFieldNames) *input_field(z, name) = a * input_field(x, name) + b * input_field(y, name);
    const auto fx = evaluate_indicators(x, k), fy = evaluate_indicators(y, k), fz = evaluate_indicators(z, k);
    bool ok = close(fz.ld, a, fx.ld, b, fy.ld) && close(fz.pc, a, fx.pc, b, fy.pc) &&
              close(fz.cci, a, fx.cci, b, fy.cci) && close(fz.fr, a, fx.fr, b, fy.fr) &&
              close(fz.wtr, a, fx.wtr, b, fy.wtr) && close(fz.lsbct, a, fx.lsbct, b, fy.lsbct);
    // Efficiency is linear in (indicator vector, nevi).
    IndicatorVector vx{uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -5, 5),
                       uniform(rng, -5, 5), uniform(rng, -5, 5)};
    IndicatorVector vy{uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -5, 5),
                       uniform(rng, -5, 5), uniform(rng, -5, 5)};
    IndicatorVector vz{a * vx.ld + b * vy.ld, a * vx.pc + b * vy.pc, a * vx.cci + b * vy.cci,
                       a * vx.fr + b * vy.fr, a * vx.wtr + b * vy.wtr, a * vx.lsbct + b * vy.lsbct};
    const double nx = uniform(rng, 0, 1), ny = uniform(rng, 0, 1);
    ok &= close(nev_efficiency(vz, a * nx + b * ny, k.w, 0), a, nev_efficiency(vx, nx, k.w, 0), b,
                nev_efficiency(vy, ny, k.w, 0));
    failures += !ok;
  }

  const std::array<double, kEquationCount> sigma{0.2, 0.01, 0.05, 0.3, 1.5, 0.1, 0.0005};
  NoiseSource noise(sigma, 2024);
  int noise_failures = 0;
  double worst_sd_error = 0.0, worst_mean_ratio = 0.0;
  for (std::size_t eq = 0; eq < kEquationCount; ++eq) {
    std::vector<double> draws(kNoiseDraws);
    for (auto& v : draws) v = noise.draw(static_cast<Equation>(eq));
    const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / kNoiseDraws;
    double ss = 0.0;
    for (double v : draws) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (kNoiseDraws - 1));
    const double mean_bound = 4 * sigma[eq] / std::sqrt(static_cast<double>(kNoiseDraws));
    worst_mean_ratio = std::max(worst_mean_ratio, std::abs(mean) / mean_bound);
    worst_sd_error = std::max(worst_sd_error, std::abs(sd - sigma[eq]) / sigma[eq]);
    noise_failures += std::abs(mean) > mean_bound || std::abs(sd - sigma[eq]) > kNoiseSdTol * sigma[eq];
  }
  return {failures == 0 && noise_failures == 0,
          fmt::format("{} linearity trials, {} failures; 7 equations x {} draws, max |mean|/bound {:.3f}, "
                      "max relative sd error {:.4f}",
                      kTrials, failures, kNoiseDraws, worst_mean_ratio, worst_sd_error)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
    double time_limit_s;  // "instant" is read as one second
  };
  const std::vector<Criterion> criteria{
      {"standardization identity", standardization_identity, 1},
      {"fixture table rendering", fixture_tables, 1},
      {"LSTM gradient oracle", gradient_oracle, 30},
      {"forecast quality", forecast_quality, 120},
      {"Bayesian optimizer sanity", bayes_sanity, 30},
      {"EWM oracle", ewm_oracle, 10},
      {"anomaly detection exactness", anomaly_exactness, 1},
      {"correlation signs", correlation_signs, 10},
      {"end-to-end determinism", end_to_end_determinism, 180},
      {"linearity and noise", linearity_and_noise, 30},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > criteria[i].time_limit_s) {
      o.pass = false;
      o.detail += fmt::format("; exceeded {} s limit", criteria[i].time_limit_s);
    }
    std::cout << fmt::format("criterion {:>2} {}  {}: {} [{:.2f} s]\n", i + 1, o.pass ? "PASS" : "FAIL",
                             criteria[i].name, o.detail, seconds)
              << std::flush;
    failed += !o.pass;
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
