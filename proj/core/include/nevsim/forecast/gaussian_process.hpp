#pragma once

#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace nevsim::forecast {

/// Zero-mean GP with a unit-variance squared-exponential kernel over
/// standardized targets. The only noise is a small jitter added to the
/// diagonal, grown only when the Cholesky factorization fails.
class GaussianProcess {
 public:
  /// Lengthscale is chosen from a fixed grid by maximum marginal likelihood.
  void fit(const std::vector<std::vector<double>>& points, std::span<const double> values);
  void fit(const std::vector<std::vector<double>>& points, std::span<const double> values,
           double lengthscale);

  struct Posterior {
    double mean = 0.0;
    double variance = 0.0;
  };
  /// Mean and variance in the original target units.
  Posterior predict(std::span<const double> x) const;

  double lengthscale() const { return lengthscale_; }
  double jitter() const { return jitter_; }
  double log_marginal_likelihood() const { return lml_; }

 private:
  double kernel(std::span<const double> a, std::span<const double> b) const;
  bool factorize(double lengthscale);

  std::vector<std::vector<double>> points_;
  Eigen::VectorXd y_;  // standardized
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  double lengthscale_ = 0.2;
  double jitter_ = 1e-10;
  double lml_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
};

/// Expected improvement below `best` for a minimization problem.
double expected_improvement(double mean, double variance, double best, double xi);

}  // namespace nevsim::forecast
