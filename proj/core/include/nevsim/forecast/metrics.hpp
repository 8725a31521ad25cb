#pragma once

#include <span>

namespace nevsim::forecast {

/// Mean of squared residuals. Throws Error{BadInput} on empty or mismatched input.
double mse(std::span<const double> actual, std::span<const double> predicted);

/// 1 - SS_res / SS_tot. Throws Error{DegenerateSeries} when `actual` is constant.
double r2(std::span<const double> actual, std::span<const double> predicted);

}  // namespace nevsim::forecast
