#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nevsim/forecast/trainer.hpp"

namespace nevsim::forecast {

enum class DimScale { Linear, Log };

struct SearchDim {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  DimScale scale = DimScale::Linear;
  bool integer = false;

  /// Maps u in [0, 1] onto the dimension, rounding integer dimensions.
  double decode(double u) const;
};

struct SearchSpace {
  std::vector<SearchDim> dims;
};

struct Evaluation {
  std::size_t index = 0;
  bool initial = false;             // quasi-random design point
  std::vector<double> unit_point;   // GP coordinates in [0, 1]^k
  std::vector<double> point;        // decoded
  double value = 0.0;               // +inf when the objective failed

  bool operator==(const Evaluation&) const = default;
};

struct OptimizationResult {
  std::vector<double> best_point;
  double best_value = 0.0;
  std::vector<Evaluation> log;
};

using Objective = std::function<double(std::span<const double>)>;

/// GP/expected-improvement minimization over a box. The first
/// max(3, ceil(budget / 3)) points come from a seed-shifted Halton sequence; each
/// later point maximizes expected improvement over a seeded candidate set.
/// An objective that throws nevsim::Error is logged as +inf and the GP is fed
/// the worst finite value seen instead. Throws Error{BadInput} for budget < 3
/// or an empty/degenerate box.
OptimizationResult bayes_minimize(const SearchSpace& space, const Objective& objective, int budget,
                                  std::uint64_t seed);

/// Seed-shifted Halton points in [0, 1]^dim (Cranley-Patterson rotation).
std::vector<std::vector<double>> halton_points(std::size_t count, std::size_t dim, std::uint64_t seed);

struct IntRange {
  int lower = 0;
  int upper = 0;
};
struct RealRange {
  double lower = 0.0;
  double upper = 0.0;
};

/// Default box for LSTM hyperparameter tuning; learning rate is searched on a log scale.
struct HyperparamSpace {
  IntRange hidden_size{4, 64};
  RealRange learning_rate{1e-4, 1e-1};
  IntRange window{4, 32};
  IntRange epochs{50, 500};

  SearchSpace to_search_space() const;
};

struct TuningEvaluation {
  std::size_t index = 0;
  bool initial = false;
  Hyperparams hp;
  double validation_mse = 0.0;

  bool operator==(const TuningEvaluation&) const = default;
};

struct TuningResult {
  Hyperparams best;
  double best_validation_mse = 0.0;
  std::vector<TuningEvaluation> log;
};

/// Tunes LSTM hyperparameters by Bayesian optimization. Each candidate is
/// trained on the first `split` share of `series` and scored by the scaled
/// MSE on the remainder. Window bounds are capped to what the split allows.
TuningResult bayes_optimize(std::span<const double> series, const HyperparamSpace& space, int budget,
                            std::uint64_t seed, double split = 0.8);

}  // namespace nevsim::forecast
