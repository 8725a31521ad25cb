#include "nevsim/weighting.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>

#include <fmt/format.h>

#include "nevsim/error.hpp"

namespace nevsim::weighting {

NormalizedMatrix normalize_matrix(const IndicatorMatrix& matrix) {
  if (matrix.values.size() != matrix.rows * matrix.cols || matrix.directions.size() != matrix.cols) {
    throw Error(ErrorCode::BadInput, "normalize_matrix: shape mismatch");
  }
  if (matrix.rows == 0) throw Error(ErrorCode::BadInput, "normalize_matrix: empty matrix");
  for (double v : matrix.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::BadInput, "normalize_matrix: non-finite entry");
  }
  NormalizedMatrix out{matrix.rows, matrix.cols, std::vector<double>(matrix.values.size()),
                       std::vector<bool>(matrix.cols, false)};
  for (std::size_t j = 0; j < matrix.cols; ++j) {
    double lo = matrix.at(0, j), hi = lo;
    for (std::size_t i = 1; i < matrix.rows; ++i) {
      lo = std::min(lo, matrix.at(i, j));
      hi = std::max(hi, matrix.at(i, j));
    }
    if (hi == lo) {
      out.constant_columns[j] = true;
      for (std::size_t i = 0; i < matrix.rows; ++i) out.values[i * out.cols + j] = 0.5;
      continue;
    }
    const bool cost = matrix.directions[j] == Direction::Cost;
    for (std::size_t i = 0; i < matrix.rows; ++i) {
      const double x = matrix.at(i, j);
      out.values[i * out.cols + j] = cost ? (hi - x) / (hi - lo) : (x - lo) / (hi - lo);
    }
  }
  return out;
}

WeightVector entropy_weights(std::size_t rows, std::size_t cols, std::span<const double> values) {
  if (rows < 2) throw Error(ErrorCode::BadInput, "entropy_weights: need at least two samples");
  if (cols < 1 || values.size() != rows * cols) throw Error(ErrorCode::BadInput, "entropy_weights: shape mismatch");
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::BadInput, "entropy_weights: entries must be finite and nonnegative");
    }
  }
  WeightVector out;
  out.entropies.resize(cols);
  const double inv_log_n = 1.0 / std::log(static_cast<double>(rows));
  for (std::size_t j = 0; j < cols; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rows; ++i) sum += values[i * cols + j];
    double h = 0.0;
    if (sum > 0.0) {
      for (std::size_t i = 0; i < rows; ++i) {
        const double p = values[i * cols + j] / sum;
        if (p > 0.0) h -= p * std::log(p);
      }
      out.entropies[j] = h * inv_log_n;
    } else {
      out.entropies[j] = 1.0;
    }
  }

  double denom = 0.0;
  for (double e : out.entropies) denom += std::max(0.0, 1.0 - e);
  out.weights.resize(cols);
  if (denom <= 0.0) {
    out.uniform_fallback = true;
    std::fill(out.weights.begin(), out.weights.end(), 1.0 / static_cast<double>(cols));
  } else {
    for (std::size_t j = 0; j < cols; ++j) out.weights[j] = std::max(0.0, 1.0 - out.entropies[j]) / denom;
  }
  return out;
}

WeightVector entropy_weights(const NormalizedMatrix& normalized) {
  auto out = entropy_weights(normalized.rows, normalized.cols, normalized.values);
  for (std::size_t j = 0; j < normalized.cols; ++j) {
    if (normalized.constant_columns[j]) out.degenerate_columns.push_back(j);
  }
  return out;
}

WeightVector ewm(const IndicatorMatrix& matrix) { return entropy_weights(normalize_matrix(matrix)); }

IndicatorMatrix read_matrix_csv(std::istream& in) {
  IndicatorMatrix m;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Schema, "matrix CSV has no header row");
  auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::stringstream ss(s);
    std::string f;
    while (std::getline(ss, f, ',')) {
      while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.pop_back();
      while (!f.empty() && f.front() == ' ') f.erase(0, 1);
      fields.push_back(f);
    }
    return fields;
  };
  m.names = split(line);
  m.cols = m.names.size();
  m.directions.assign(m.cols, Direction::Benefit);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \r\t") == std::string::npos) continue;
    ++row;
    const auto fields = split(line);
    if (fields.size() != m.cols) throw Error(ErrorCode::Parse, fmt::format("matrix CSV row {}: field count", row));
    for (const auto& f : fields) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || ptr != f.data() + f.size()) {
        throw Error(ErrorCode::Parse, fmt::format("matrix CSV row {}: bad number '{}'", row, f));
      }
      m.values.push_back(v);
    }
  }
  m.rows = row;
  return m;
}

}  // namespace nevsim::weighting
