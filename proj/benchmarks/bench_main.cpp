#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <sstream>

#include "nevsim/behavior.hpp"
#include "nevsim/fleet.hpp"
#include "nevsim/forecast/bayes_opt.hpp"
#include "nevsim/forecast/gaussian_process.hpp"
#include "nevsim/forecast/lstm.hpp"
#include "nevsim/forecast/trainer.hpp"
#include "nevsim/random.hpp"
#include "nevsim/telemetry.hpp"
#include "nevsim/weighting.hpp"

using namespace nevsim;

namespace {

std::vector<double> random_window(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> w(n);
  for (auto& x : w) x = uniform(rng, -1.0, 1.0);
  return w;
}

std::vector<double> sine(std::size_t n) {
  std::vector<double> s(n);
  for (std::size_t t = 0; t < n; ++t) s[t] = std::sin(t * 0.157) + 0.002 * static_cast<double>(t);
  return s;
}

}  // namespace

// args: hidden size, window length
static void BM_LstmForward(benchmark::State& state) {
  const auto params = forecast::LstmParams::random(1, state.range(0), 1);
  const auto window = random_window(state.range(1), 2);
  forecast::ForwardCache cache;
  for (auto _ : state) {
    forecast::lstm_forward_unchecked(params, window, cache);
    benchmark::DoNotOptimize(cache.prediction);
  }
}
BENCHMARK(BM_LstmForward)->ArgsProduct({{4, 16, 64}, {8, 32}});

static void BM_LstmBackward(benchmark::State& state) {
  const auto params = forecast::LstmParams::random(1, state.range(0), 1);
  const auto window = random_window(state.range(1), 2);
  forecast::ForwardCache cache;
  forecast::LstmParams grad(1, state.range(0));
  for (auto _ : state) {
    forecast::lstm_forward_unchecked(params, window, cache);
    forecast::lstm_accumulate_gradient(params, cache, 0.25, 1.0, grad);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_LstmBackward)->ArgsProduct({{4, 16, 64}, {8, 32}});

static void BM_TrainEpochs(benchmark::State& state) {
  const auto series = sine(200);
  const forecast::Hyperparams hp{static_cast<int>(state.range(0)), 0.01, 12, 10, 1};
  for (auto _ : state) benchmark::DoNotOptimize(forecast::train(series, hp));
  state.SetItemsProcessed(state.iterations() * hp.epochs);
}
BENCHMARK(BM_TrainEpochs)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_EntropyWeights(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  weighting::IndicatorMatrix m;
  m.rows = rows;
  m.cols = 7;
  m.values = random_window(rows * 7, 3);
  m.directions.assign(7, weighting::Direction::Benefit);
  for (auto _ : state) benchmark::DoNotOptimize(weighting::ewm(m));
}
BENCHMARK(BM_EntropyWeights)->Range(8, 4096);

static void BM_GaussianProcessFit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(4);
  std::vector<std::vector<double>> x(n, std::vector<double>(4));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x[i]) v = uniform(rng);
    y[i] = std::sin(3 * x[i][0]) + x[i][1] * x[i][2];
  }
  forecast::GaussianProcess gp;
  for (auto _ : state) {
    gp.fit(x, y);
    benchmark::DoNotOptimize(gp.predict(x[0]));
  }
}
BENCHMARK(BM_GaussianProcessFit)->Arg(10)->Arg(25)->Arg(50);

static void BM_BayesMinimize(benchmark::State& state) {
  const forecast::SearchSpace box{{forecast::SearchDim{"x", 0.0, 1.0}, forecast::SearchDim{"y", 0.0, 1.0}}};
  auto f = [](std::span<const double> p) { return (p[0] - 0.3) * (p[0] - 0.3) + (p[1] - 0.7) * (p[1] - 0.7); };
  for (auto _ : state) benchmark::DoNotOptimize(forecast::bayes_minimize(box, f, state.range(0), 1));
}
BENCHMARK(BM_BayesMinimize)->Arg(10)->Arg(25)->Unit(benchmark::kMillisecond);

static void BM_ParseTelemetry(benchmark::State& state) {
  fleet::FleetSpec spec;
  spec.days = static_cast<int>(state.range(0));
  std::ostringstream csv;
  telemetry::write_telemetry_csv(csv, fleet::generate_fleet(spec).records);
  const auto text = csv.str();
  for (auto _ : state) {
    std::istringstream in(text);
    benchmark::DoNotOptimize(telemetry::parse_telemetry(in));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseTelemetry)->Arg(7)->Unit(benchmark::kMillisecond);

static void BM_FleetAnomalies(benchmark::State& state) {
  fleet::FleetSpec spec;
  spec.days = 30;
  const auto trace = fleet::generate_fleet(spec);
  for (auto _ : state) benchmark::DoNotOptimize(behavior::detect_fleet_anomalies(trace.records, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trace.records.size()));
}
BENCHMARK(BM_FleetAnomalies)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
