#include "nevsim/forecast/bayes_opt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "nevsim/error.hpp"
#include "nevsim/forecast/gaussian_process.hpp"
#include "nevsim/random.hpp"

namespace nevsim::forecast {

namespace {

constexpr std::array<unsigned, 10> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
constexpr std::size_t kRandomCandidates = 2048;
constexpr std::size_t kLocalCandidates = 512;

double radical_inverse(std::uint64_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

double encode(const SearchDim& dim, double value) {
  if (dim.upper == dim.lower) return 0.5;
  if (dim.scale == DimScale::Log) {
    return (std::log(value) - std::log(dim.lower)) / (std::log(dim.upper) - std::log(dim.lower));
  }
  return (value - dim.lower) / (dim.upper - dim.lower);
}

void validate(const SearchSpace& space, int budget) {
  if (budget < 3) throw Error(ErrorCode::BadInput, "bayes_minimize: budget must be at least 3");
  if (space.dims.empty()) throw Error(ErrorCode::BadInput, "bayes_minimize: empty search space");
  if (space.dims.size() > kPrimes.size()) throw Error(ErrorCode::BadInput, "bayes_minimize: too many dimensions");
  bool any_free = false;
  for (const auto& d : space.dims) {
    if (!std::isfinite(d.lower) || !std::isfinite(d.upper) || d.lower > d.upper ||
        (d.scale == DimScale::Log && d.lower <= 0.0)) {
      throw Error(ErrorCode::BadInput, fmt::format("bayes_minimize: invalid bounds for '{}'", d.name));
    }
    any_free = any_free || d.upper > d.lower;
  }
  if (!any_free) throw Error(ErrorCode::BadInput, "bayes_minimize: degenerate search space");
}

}  // namespace

double SearchDim::decode(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  double v = scale == DimScale::Log ? std::exp(std::log(lower) + u * (std::log(upper) - std::log(lower)))
                                    : lower + u * (upper - lower);
  if (integer) v = std::round(v);
  return std::clamp(v, lower, upper);
}

std::vector<std::vector<double>> halton_points(std::size_t count, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, "halton-shift"));
  std::vector<double> shift(dim);
  for (double& s : shift) s = uniform(rng);
  std::vector<std::vector<double>> out(count, std::vector<double>(dim));
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t k = 0; k < dim; ++k) {
      const double v = radical_inverse(i + 1, kPrimes[k]) + shift[k];
      out[i][k] = v - std::floor(v);
    }
  }
  return out;
}

OptimizationResult bayes_minimize(const SearchSpace& space, const Objective& objective, int budget,
                                  std::uint64_t seed) {
  validate(space, budget);
  const std::size_t dim = space.dims.size();
  const auto total = static_cast<std::size_t>(budget);
  const std::size_t n_initial = std::max<std::size_t>(3, (total + 2) / 3);
  const auto design = halton_points(n_initial, dim, seed);
  std::mt19937_64 rng(derive_seed(seed, "acquisition"));

  OptimizationResult result;
  std::vector<std::vector<double>> observed;
  std::vector<double> values;

  auto evaluate = [&](std::vector<double> u, bool initial) {
    Evaluation e;
    e.index = result.log.size();
    e.initial = initial;
    e.point.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      e.point[k] = space.dims[k].decode(u[k]);
      u[k] = std::clamp(encode(space.dims[k], e.point[k]), 0.0, 1.0);
    }
    e.unit_point = u;
    try {
      e.value = objective(e.point);
      if (std::isnan(e.value)) e.value = std::numeric_limits<double>::infinity();
    } catch (const Error&) {
      e.value = std::numeric_limits<double>::infinity();
    }
    observed.push_back(e.unit_point);
    values.push_back(e.value);
    result.log.push_back(std::move(e));
  };

  for (std::size_t i = 0; i < n_initial; ++i) evaluate(design[i], true);

  GaussianProcess gp;
  for (std::size_t i = n_initial; i < total; ++i) {
    double worst = -std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (!std::isfinite(values[j])) continue;
      worst = std::max(worst, values[j]);
      if (values[j] < best) {
        best = values[j];
        best_idx = j;
      }
    }

    std::vector<std::vector<double>> candidates;
    candidates.reserve(kRandomCandidates + kLocalCandidates);
    for (std::size_t c = 0; c < kRandomCandidates; ++c) {
      std::vector<double> u(dim);
      for (double& x : u) x = uniform(rng);
      candidates.push_back(std::move(u));
    }
    if (!std::isfinite(best)) {
      // Nothing finite to model yet; keep exploring.
      evaluate(candidates.front(), false);
      continue;
    }
    for (std::size_t c = 0; c < kLocalCandidates; ++c) {
      const double step = c % 2 == 0 ? 0.1 : 0.02;
      std::vector<double> u = observed[best_idx];
      for (double& x : u) x = std::clamp(x + step * standard_normal(rng), 0.0, 1.0);
      candidates.push_back(std::move(u));
    }

    std::vector<double> targets(values);
    for (double& v : targets) {
      if (!std::isfinite(v)) v = worst;
    }
    gp.fit(observed, targets);
    const auto [lo, hi] = std::minmax_element(targets.begin(), targets.end());
    const double xi = 1e-3 * (*hi - *lo);

    double best_ei = 0.0;
    const std::vector<double>* pick = nullptr;
    for (const auto& u : candidates) {
      const auto post = gp.predict(u);
      const double ei = expected_improvement(post.mean, post.variance, best, xi);
      if (ei > best_ei) {
        best_ei = ei;
        pick = &u;
      }
    }
    evaluate(pick ? *pick : candidates.front(), false);
  }

  std::size_t best_idx = 0;
  for (std::size_t j = 1; j < result.log.size(); ++j) {
    if (result.log[j].value < result.log[best_idx].value) best_idx = j;
  }
  result.best_point = result.log[best_idx].point;
  result.best_value = result.log[best_idx].value;
  return result;
}

SearchSpace HyperparamSpace::to_search_space() const {
  SearchSpace s;
  s.dims.push_back({"hidden_size", static_cast<double>(hidden_size.lower),
                    static_cast<double>(hidden_size.upper), DimScale::Linear, true});
  s.dims.push_back({"learning_rate", learning_rate.lower, learning_rate.upper, DimScale::Log, false});
  s.dims.push_back({"window", static_cast<double>(window.lower), static_cast<double>(window.upper),
                    DimScale::Linear, true});
  s.dims.push_back({"epochs", static_cast<double>(epochs.lower), static_cast<double>(epochs.upper),
                    DimScale::Linear, true});
  return s;
}

TuningResult bayes_optimize(std::span<const double> series, const HyperparamSpace& space, int budget,
                            std::uint64_t seed, double split) {
  if (!(split > 0.0 && split < 1.0)) throw Error(ErrorCode::BadInput, "bayes_optimize: split must lie in (0, 1)");
  if (space.hidden_size.lower < 1 || space.window.lower < 1 || space.epochs.lower < 1 ||
      space.learning_rate.lower <= 0.0) {
    throw Error(ErrorCode::BadInput, "bayes_optimize: search space lower bounds must be positive");
  }
  auto box = space.to_search_space();
  const auto n = static_cast<double>(series.size());
  const int n_train = static_cast<int>(std::floor(split * n));
  const int window_cap = std::min(n_train - 1, static_cast<int>(series.size()) - 3);
  if (window_cap < space.window.lower) {
    throw Error(ErrorCode::BadInput,
                fmt::format("bayes_optimize: series of length {} leaves no room for window {}",
                            series.size(), space.window.lower));
  }
  box.dims[2].upper = std::min(box.dims[2].upper, static_cast<double>(window_cap));

  const std::uint64_t train_seed = derive_seed(seed, "lstm-init");
  auto to_hp = [&](std::span<const double> p) {
    Hyperparams hp;
    hp.hidden_size = static_cast<int>(p[0]);
    hp.learning_rate = p[1];
    hp.window = static_cast<int>(p[2]);
    hp.epochs = static_cast<int>(p[3]);
    hp.seed = train_seed;
    return hp;
  };
  const Objective objective = [&](std::span<const double> p) {
    return train(series, to_hp(p), split).diagnostics.mse_test;
  };

  const auto opt = bayes_minimize(box, objective, budget, seed);
  TuningResult out;
  out.best = to_hp(opt.best_point);
  out.best_validation_mse = opt.best_value;
  for (const auto& e : opt.log) out.log.push_back({e.index, e.initial, to_hp(e.point), e.value});
  return out;
}

}  // namespace nevsim::forecast
