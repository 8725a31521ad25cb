#include "nevsim/forecast/trainer.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nevsim/error.hpp"
#include "nevsim/forecast/metrics.hpp"

namespace nevsim::forecast {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

struct SplitPlan {
  std::size_t n = 0;
  std::size_t n_train = 0;
  std::size_t window = 0;
};

SplitPlan plan_split(std::size_t n, const Hyperparams& hp, double split) {
  if (hp.hidden_size < 1 || hp.window < 1 || hp.epochs < 1 || !(hp.learning_rate >= 0.0) ||
      !std::isfinite(hp.learning_rate)) {
    throw Error(ErrorCode::BadInput, "train: hyperparameters must be positive");
  }
  if (!(split > 0.0 && split < 1.0)) throw Error(ErrorCode::BadInput, "train: split must lie in (0, 1)");
  SplitPlan p;
  p.n = n;
  p.window = static_cast<std::size_t>(hp.window);
  p.n_train = static_cast<std::size_t>(std::floor(split * static_cast<double>(n)));
  if (n <= p.window + 2 || p.n_train <= p.window || p.n_train >= n) {
    throw Error(ErrorCode::BadInput,
                fmt::format("train: series of length {} too short for window {} at split {}", n,
                            hp.window, split));
  }
  return p;
}

// Mean squared one-step error over targets [first, last), plus predictions.
double evaluate(const LstmParams& params, std::span<const double> scaled, std::size_t window,
                std::size_t first, std::size_t last, std::vector<double>* predictions,
                ForwardCache& cache) {
  double acc = 0.0;
  for (std::size_t t = first; t < last; ++t) {
    lstm_forward_unchecked(params, scaled.subspan(t - window, window), cache);
    const double e = cache.prediction - scaled[t];
    acc += e * e;
    if (predictions) predictions->push_back(cache.prediction);
  }
  return acc / static_cast<double>(last - first);
}

std::optional<double> r2_or_none(std::span<const double> actual, std::span<const double> predicted) {
  try {
    return r2(actual, predicted);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

Scaler Scaler::fit(std::span<const double> series) {
  if (series.empty()) throw Error(ErrorCode::BadInput, "Scaler::fit: empty series");
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  if (!std::isfinite(*lo) || !std::isfinite(*hi)) throw Error(ErrorCode::BadInput, "Scaler::fit: non-finite value");
  if (*hi > *lo) return {*lo, *hi};
  const double half = 0.5 * std::max(std::abs(*lo), 1.0);
  return {*lo - half, *lo + half};
}

TrainResult train(std::span<const double> series, const Hyperparams& hp, double split) {
  const auto plan = plan_split(series.size(), hp, split);
  for (double v : series) {
    if (!std::isfinite(v)) throw Error(ErrorCode::BadInput, "train: non-finite value in series");
  }

  TrainResult result;
  auto& model = result.model;
  model.hp = hp;
  model.scaler = Scaler::fit(series.first(plan.n_train));
  model.params = LstmParams::random(1, static_cast<std::size_t>(hp.hidden_size), hp.seed);

  std::vector<double> scaled(series.size());
  std::transform(series.begin(), series.end(), scaled.begin(),
                 [&](double x) { return model.scaler.forward(x); });

  auto& params = model.params;
  LstmParams grad(1, params.hidden());
  std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0);
  ForwardCache cache;
  const std::size_t n_windows = plan.n_train - plan.window;
  const double weight = 1.0 / static_cast<double>(n_windows);
  auto& diag = result.diagnostics;
  diag.loss_curve.reserve(static_cast<std::size_t>(hp.epochs));

  double beta1_t = 1.0, beta2_t = 1.0;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    grad.set_zero();
    double loss = 0.0;
    for (std::size_t t = plan.window; t < plan.n_train; ++t) {
      lstm_forward_unchecked(params, std::span<const double>(scaled).subspan(t - plan.window, plan.window),
                             cache);
      const double e = cache.prediction - scaled[t];
      loss += e * e;
      lstm_accumulate_gradient(params, cache, scaled[t], weight, grad);
    }
    loss *= weight;
    if (!std::isfinite(loss)) throw TrainingDiverged(epoch);
    diag.loss_curve.push_back(loss);

    beta1_t *= kBeta1;
    beta2_t *= kBeta2;
    const auto g = grad.values();
    auto p = params.values();
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * g[k];
      v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * g[k] * g[k];
      const double m_hat = m[k] / (1.0 - beta1_t);
      const double v_hat = v[k] / (1.0 - beta2_t);
      p[k] -= hp.learning_rate * m_hat / (std::sqrt(v_hat) + kAdamEps);
    }
  }
  if (!params.all_finite()) throw TrainingDiverged(hp.epochs);

  std::vector<double> pred_train, pred_test;
  diag.mse_train = evaluate(params, scaled, plan.window, plan.window, plan.n_train, &pred_train, cache);
  diag.mse_test = evaluate(params, scaled, plan.window, plan.n_train, plan.n, &pred_test, cache);
  if (!std::isfinite(diag.mse_train) || !std::isfinite(diag.mse_test)) throw TrainingDiverged(hp.epochs);

  const double range = model.scaler.max - model.scaler.min;
  diag.mse_train_raw = diag.mse_train * range * range;
  diag.mse_test_raw = diag.mse_test * range * range;
  if (diag.mse_train > 0.0) diag.mse_ratio = diag.mse_test / diag.mse_train;

  const std::span<const double> all(scaled);
  diag.r2_train = r2_or_none(all.subspan(plan.window, n_windows), pred_train);
  diag.r2_test = r2_or_none(all.subspan(plan.n_train), pred_test);

  diag.test_actual.assign(series.begin() + static_cast<std::ptrdiff_t>(plan.n_train), series.end());
  diag.test_predicted.resize(pred_test.size());
  std::transform(pred_test.begin(), pred_test.end(), diag.test_predicted.begin(),
                 [&](double s) { return model.scaler.inverse(s); });
  return result;
}

double training_mse(const ForecastModel& model, std::span<const double> series, double split) {
  const auto plan = plan_split(series.size(), model.hp, split);
  std::vector<double> scaled(series.size());
  std::transform(series.begin(), series.end(), scaled.begin(),
                 [&](double x) { return model.scaler.forward(x); });
  ForwardCache cache;
  return evaluate(model.params, scaled, plan.window, plan.window, plan.n_train, nullptr, cache);
}

std::vector<double> extend_series(const ForecastModel& model, std::span<const double> series,
                                  int horizon) {
  if (horizon < 0) throw Error(ErrorCode::BadInput, "extend_series: horizon must be >= 0");
  const auto window = static_cast<std::size_t>(model.hp.window);
  std::vector<double> out(series.begin(), series.end());
  if (horizon == 0) return out;
  if (series.size() < window) throw Error(ErrorCode::BadInput, "extend_series: series shorter than window");
  if (!model.params.all_finite()) throw Error(ErrorCode::NonFiniteParams, "extend_series: non-finite parameter");

  std::vector<double> scaled(series.size());
  std::transform(series.begin(), series.end(), scaled.begin(),
                 [&](double x) { return model.scaler.forward(x); });
  ForwardCache cache;
  out.reserve(series.size() + static_cast<std::size_t>(horizon));
  for (int step = 0; step < horizon; ++step) {
    lstm_forward_unchecked(model.params, std::span<const double>(scaled).last(window), cache);
    double s = cache.prediction;
    s = std::isfinite(s) ? std::clamp(s, 0.0, 1.0) : 0.5;
    scaled.push_back(s);
    out.push_back(model.scaler.inverse(s));
  }
  return out;
}

}  // namespace nevsim::forecast
