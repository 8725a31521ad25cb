#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace nevsim::weighting {

enum class Direction { Benefit, Cost };

/// n samples x m indicators, row-major.
struct IndicatorMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<Direction> directions;  // one per column
  std::vector<std::string> names;     // optional, one per column

  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
};

struct NormalizedMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<bool> constant_columns;

  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

struct WeightVector {
  std::vector<double> weights;
  std::vector<double> entropies;
  std::vector<std::size_t> degenerate_columns;  // constant input columns
  bool uniform_fallback = false;                // every entropy was 1

  bool operator==(const WeightVector&) const = default;
};

/// Min-max scaling per column, flipped for Cost columns; constant columns map
/// to 0.5 and are flagged. Throws Error{BadInput} on non-finite entries or
/// inconsistent shape.
NormalizedMatrix normalize_matrix(const IndicatorMatrix& matrix);

/// Entropy weights from nonnegative entries. p_ij = x_ij / sum_i x_ij (an
/// all-zero column counts as uniform), e_j = -(1/ln n) sum_i p_ij ln p_ij with
/// 0 ln 0 = 0, w_j = (1 - e_j) / sum_k (1 - e_k); uniform 1/m if every e_j = 1.
/// Throws Error{BadInput} for fewer than two rows or negative/non-finite entries.
WeightVector entropy_weights(std::size_t rows, std::size_t cols, std::span<const double> values);
WeightVector entropy_weights(const NormalizedMatrix& normalized);

/// normalize_matrix followed by entropy_weights, carrying the constant-column flags.
WeightVector ewm(const IndicatorMatrix& matrix);

/// CSV with a header of indicator names; every column defaults to Benefit.
IndicatorMatrix read_matrix_csv(std::istream& in);

}  // namespace nevsim::weighting
