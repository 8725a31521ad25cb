#include "nevsim/forecast/metrics.hpp"

#include <algorithm>

#include "nevsim/error.hpp"

namespace nevsim::forecast {

namespace {

void check(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.empty() || actual.size() != predicted.size()) {
    throw Error(ErrorCode::BadInput, "metrics need equal, nonzero lengths");
  }
}

}  // namespace

double mse(std::span<const double> actual, std::span<const double> predicted) {
  check(actual, predicted);
  double acc = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double e = actual[i] - predicted[i];
    acc += e * e;
  }
  return acc / static_cast<double>(actual.size());
}

double r2(std::span<const double> actual, std::span<const double> predicted) {
  check(actual, predicted);
  const auto [lo, hi] = std::minmax_element(actual.begin(), actual.end());
  if (*lo == *hi) throw Error(ErrorCode::DegenerateSeries, "r2: actual series has zero variance");
  double mean = 0.0;
  for (double a : actual) mean += a;
  mean /= static_cast<double>(actual.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    ss_res += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
    ss_tot += (actual[i] - mean) * (actual[i] - mean);
  }
  return 1.0 - ss_res / ss_tot;
}

}  // namespace nevsim::forecast
