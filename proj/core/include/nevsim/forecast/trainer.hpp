#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nevsim/forecast/lstm.hpp"

namespace nevsim::forecast {

struct Hyperparams {
  int hidden_size = 16;
  double learning_rate = 0.01;  // 0 is accepted and freezes the parameters
  int window = 8;
  int epochs = 200;
  std::uint64_t seed = 0;

  bool operator==(const Hyperparams&) const = default;
};

/// Affine map of [min, max] onto [0, 1], fit on the training portion.
struct Scaler {
  double min = 0.0;
  double max = 1.0;

  /// A constant series is widened to [c - s/2, c + s/2], s = max(|c|, 1),
  /// so that it maps to 0.5 instead of dividing by zero.
  static Scaler fit(std::span<const double> series);

  double forward(double x) const { return (x - min) / (max - min); }
  double inverse(double s) const { return min + s * (max - min); }

  bool operator==(const Scaler&) const = default;
};

struct FitDiagnostics {
  /// Training MSE (scaled units) of the parameters entering each epoch.
  std::vector<double> loss_curve;
  std::optional<double> r2_train;  // absent when the split's targets are constant
  std::optional<double> r2_test;
  double mse_train = 0.0;  // scaled units
  double mse_test = 0.0;
  double mse_train_raw = 0.0;  // original units
  double mse_test_raw = 0.0;
  std::optional<double> mse_ratio;  // mse_test / mse_train
  std::vector<double> test_actual;     // original units
  std::vector<double> test_predicted;  // one-step-ahead, original units

  bool operator==(const FitDiagnostics&) const = default;
};

struct ForecastModel {
  LstmParams params;
  Scaler scaler;
  Hyperparams hp;

  bool operator==(const ForecastModel&) const = default;
};

struct TrainResult {
  ForecastModel model;
  FitDiagnostics diagnostics;
};

/// Chronological split: the first floor(split * n) points train, one-step
/// targets after that point test. Full-batch Adam (beta1 0.9, beta2 0.999,
/// eps 1e-8) on the mean squared one-step error in scaled units.
///
/// Throws Error{BadInput} for series too short for the window and split,
/// TrainingDiverged when a loss becomes non-finite.
TrainResult train(std::span<const double> series, const Hyperparams& hp, double split = 0.8);

/// Training-set MSE (scaled units) of `params` on the windows train() builds
/// for the same series, hyperparameters and split.
double training_mse(const ForecastModel& model, std::span<const double> series, double split = 0.8);

/// Recursive multi-step forecast: each prediction is appended and fed back.
/// Predictions are clamped to [scaler.min, scaler.max]. The input series is
/// the returned prefix. Throws Error{BadInput} if horizon < 0 or the series
/// is shorter than the model window.
std::vector<double> extend_series(const ForecastModel& model, std::span<const double> series,
                                  int horizon);

}  // namespace nevsim::forecast
