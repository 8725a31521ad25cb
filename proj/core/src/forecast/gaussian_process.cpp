#include "nevsim/forecast/gaussian_process.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "nevsim/error.hpp"

namespace nevsim::forecast {

namespace {

constexpr std::array<double, 8> kLengthscaleGrid{0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 0.8, 1.2};
constexpr double kBaseJitter = 1e-10;

}  // namespace

double GaussianProcess::kernel(std::span<const double> a, std::span<const double> b) const {
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
  return std::exp(-0.5 * d2 / (lengthscale_ * lengthscale_));
}

bool GaussianProcess::factorize(double lengthscale) {
  lengthscale_ = lengthscale;
  const auto n = static_cast<Eigen::Index>(points_.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = kernel(points_[static_cast<std::size_t>(i)], points_[static_cast<std::size_t>(j)]);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  for (jitter_ = kBaseJitter; jitter_ < 1e-2; jitter_ *= 10.0) {
    llt_.compute(k + jitter_ * Eigen::MatrixXd::Identity(n, n));
    if (llt_.info() == Eigen::Success) {
      alpha_ = llt_.solve(y_);
      const double log_det = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
      lml_ = -0.5 * y_.dot(alpha_) - 0.5 * log_det -
             0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
      return true;
    }
  }
  return false;
}

void GaussianProcess::fit(const std::vector<std::vector<double>>& points, std::span<const double> values,
                          double lengthscale) {
  if (points.empty() || points.size() != values.size()) {
    throw Error(ErrorCode::BadInput, "GaussianProcess::fit: need matching, nonempty points and values");
  }
  const auto n = static_cast<Eigen::Index>(points.size());
  points_ = points;
  y_mean_ = 0.0;
  for (double v : values) y_mean_ += v;
  y_mean_ /= static_cast<double>(n);
  double var = 0.0;
  for (double v : values) var += (v - y_mean_) * (v - y_mean_);
  y_scale_ = n > 1 ? std::sqrt(var / static_cast<double>(n)) : 0.0;
  if (!(y_scale_ > 0.0)) y_scale_ = 1.0;
  y_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) y_(i) = (values[static_cast<std::size_t>(i)] - y_mean_) / y_scale_;
  if (!factorize(lengthscale)) {
    throw Error(ErrorCode::BadInput, "GaussianProcess::fit: kernel matrix is not positive definite");
  }
}

void GaussianProcess::fit(const std::vector<std::vector<double>>& points, std::span<const double> values) {
  double best_lml = -std::numeric_limits<double>::infinity();
  double best_ls = kLengthscaleGrid.front();
  for (double ls : kLengthscaleGrid) {
    fit(points, values, ls);
    if (lml_ > best_lml) {
      best_lml = lml_;
      best_ls = ls;
    }
  }
  fit(points, values, best_ls);
}

GaussianProcess::Posterior GaussianProcess::predict(std::span<const double> x) const {
  const auto n = static_cast<Eigen::Index>(points_.size());
  Eigen::VectorXd ks(n);
  for (Eigen::Index i = 0; i < n; ++i) ks(i) = kernel(points_[static_cast<std::size_t>(i)], x);
  const double mean = ks.dot(alpha_);
  const Eigen::VectorXd v = llt_.matrixL().solve(ks);
  const double var = std::max(0.0, 1.0 - v.squaredNorm());
  return {y_mean_ + y_scale_ * mean, y_scale_ * y_scale_ * var};
}

double expected_improvement(double mean, double variance, double best, double xi) {
  const double improvement = best - mean - xi;
  const double sigma = std::sqrt(std::max(variance, 0.0));
  if (sigma <= 0.0) return std::max(improvement, 0.0);
  const double z = improvement / sigma;
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return improvement * cdf + sigma * pdf;
}

}  // namespace nevsim::forecast
