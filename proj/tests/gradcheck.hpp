#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "nevsim/forecast/lstm.hpp"

namespace nevsim::gradcheck {

inline double squared_loss(const forecast::LstmParams& p, std::span<const double> window, double target) {
  const double e = forecast::lstm_forward(p, window).prediction - target;
  return e * e;
}

/// Largest per-component relative error between the analytic gradient and a
/// central difference with step `h`. Components below `floor` in magnitude
/// are compared against `floor`, since round-off in the difference quotient
/// is about 1e-10 in absolute terms.
inline double max_gradient_error(const forecast::LstmParams& params, std::span<const double> window,
                                 double target, double h = 1e-6, double floor = 1e-5) {
  const auto analytic = forecast::lstm_backward(params, window, target);
  auto probe = params;
  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double saved = probe.values()[k];
    probe.values()[k] = saved + h;
    const double up = squared_loss(probe, window, target);
    probe.values()[k] = saved - h;
    const double down = squared_loss(probe, window, target);
    probe.values()[k] = saved;
    const double numeric = (up - down) / (2 * h);
    const double a = analytic.values()[k];
    const double denom = std::max({std::abs(a), std::abs(numeric), floor});
    worst = std::max(worst, std::abs(a - numeric) / denom);
  }
  return worst;
}

}  // namespace nevsim::gradcheck
