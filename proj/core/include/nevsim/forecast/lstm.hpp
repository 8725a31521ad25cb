#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace nevsim::forecast {

/// Single-layer LSTM with an affine scalar head, stored as one flat buffer.
///
/// Block layout, each row-major, gates stacked in the order
/// input, forget, output, cell candidate:
///   input weights     [4h x d]
///   recurrent weights [4h x h]
///   gate bias         [4h]
///   head weight       [h]
///   head bias         [1]
///
/// The same type holds gradients.
class LstmParams {
 public:
  LstmParams() = default;
  LstmParams(std::size_t input_dim, std::size_t hidden);

  /// Uniform(-1/sqrt(h), 1/sqrt(h)) initialization with forget bias +1.
  static LstmParams random(std::size_t input_dim, std::size_t hidden, std::uint64_t seed);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden() const { return hidden_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  std::span<double> input_weights() { return block(0, 4 * hidden_ * input_dim_); }
  std::span<double> recurrent_weights() { return block(input_offset_end(), 4 * hidden_ * hidden_); }
  std::span<double> gate_bias() { return block(recurrent_offset_end(), 4 * hidden_); }
  std::span<double> head_weight() { return block(recurrent_offset_end() + 4 * hidden_, hidden_); }
  double& head_bias() { return values_.back(); }

  std::span<const double> input_weights() const { return cblock(0, 4 * hidden_ * input_dim_); }
  std::span<const double> recurrent_weights() const {
    return cblock(input_offset_end(), 4 * hidden_ * hidden_);
  }
  std::span<const double> gate_bias() const { return cblock(recurrent_offset_end(), 4 * hidden_); }
  std::span<const double> head_weight() const {
    return cblock(recurrent_offset_end() + 4 * hidden_, hidden_);
  }
  double head_bias() const { return values_.back(); }

  bool all_finite() const;
  void set_zero();

  bool operator==(const LstmParams&) const = default;

 private:
  std::size_t input_offset_end() const { return 4 * hidden_ * input_dim_; }
  std::size_t recurrent_offset_end() const { return input_offset_end() + 4 * hidden_ * hidden_; }
  std::span<double> block(std::size_t off, std::size_t n) { return {values_.data() + off, n}; }
  std::span<const double> cblock(std::size_t off, std::size_t n) const {
    return {values_.data() + off, n};
  }

  std::size_t input_dim_ = 0;
  std::size_t hidden_ = 0;
  std::vector<double> values_;
};

/// Activations kept from a forward pass; enough for exact backpropagation.
struct ForwardCache {
  std::size_t steps = 0;
  std::vector<double> inputs;  // steps x d
  std::vector<double> gates;   // steps x 4h, post-activation (i, f, o, g)
  std::vector<double> cell;    // (steps + 1) x h, row 0 is the zero initial state
  std::vector<double> hidden;  // (steps + 1) x h
  double prediction = 0.0;
};

/// Runs the cell over `window` (steps x d values, row-major) from a zero state.
/// Throws Error{NonFiniteParams} if any parameter is NaN or infinite and
/// Error{BadInput} if the window is empty or not a multiple of d.
ForwardCache lstm_forward(const LstmParams& params, std::span<const double> window);

/// Same as lstm_forward without the parameter scan; reuses `cache` storage.
void lstm_forward_unchecked(const LstmParams& params, std::span<const double> window,
                            ForwardCache& cache);

/// Adds weight * d/dθ (prediction - target)^2 into `grad`.
void lstm_accumulate_gradient(const LstmParams& params, const ForwardCache& cache, double target,
                              double weight, LstmParams& grad);

/// Gradient of (prediction - target)^2 with respect to every parameter.
LstmParams lstm_backward(const LstmParams& params, std::span<const double> window, double target);

}  // namespace nevsim::forecast
