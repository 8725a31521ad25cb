#include "nevsim/forecast/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nevsim/error.hpp"
#include "nevsim/random.hpp"

namespace nevsim::forecast {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

LstmParams::LstmParams(std::size_t input_dim, std::size_t hidden)
    : input_dim_(input_dim),
      hidden_(hidden),
      values_(4 * hidden * input_dim + 4 * hidden * hidden + 4 * hidden + hidden + 1, 0.0) {}

LstmParams LstmParams::random(std::size_t input_dim, std::size_t hidden, std::uint64_t seed) {
  LstmParams p(input_dim, hidden);
  std::mt19937_64 rng(seed);
  const double k = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (double& v : p.values_) v = uniform(rng, -k, k);
  auto bias = p.gate_bias();
  for (std::size_t j = 0; j < hidden; ++j) bias[hidden + j] += 1.0;
  return p;
}

bool LstmParams::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void LstmParams::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

void lstm_forward_unchecked(const LstmParams& params, std::span<const double> window,
                            ForwardCache& cache) {
  const std::size_t d = params.input_dim();
  const std::size_t h = params.hidden();
  const std::size_t steps = window.size() / d;
  cache.steps = steps;
  cache.inputs.assign(window.begin(), window.end());
  cache.gates.resize(steps * 4 * h);
  cache.cell.assign((steps + 1) * h, 0.0);
  cache.hidden.assign((steps + 1) * h, 0.0);

  const auto wx = params.input_weights();
  const auto wh = params.recurrent_weights();
  const auto b = params.gate_bias();

  for (std::size_t t = 0; t < steps; ++t) {
    const double* x = window.data() + t * d;
    const double* h_prev = cache.hidden.data() + t * h;
    const double* c_prev = cache.cell.data() + t * h;
    double* z = cache.gates.data() + t * 4 * h;
    for (std::size_t r = 0; r < 4 * h; ++r) {
      double acc = b[r];
      const double* wx_row = wx.data() + r * d;
      for (std::size_t k = 0; k < d; ++k) acc += wx_row[k] * x[k];
      const double* wh_row = wh.data() + r * h;
      for (std::size_t k = 0; k < h; ++k) acc += wh_row[k] * h_prev[k];
      z[r] = acc;
    }
    double* c = cache.cell.data() + (t + 1) * h;
    double* hs = cache.hidden.data() + (t + 1) * h;
    for (std::size_t j = 0; j < h; ++j) {
      const double ig = sigmoid(z[j]);
      const double fg = sigmoid(z[h + j]);
      const double og = sigmoid(z[2 * h + j]);
      const double gg = std::tanh(z[3 * h + j]);
      z[j] = ig;
      z[h + j] = fg;
      z[2 * h + j] = og;
      z[3 * h + j] = gg;
      c[j] = fg * c_prev[j] + ig * gg;
      hs[j] = og * std::tanh(c[j]);
    }
  }

  const auto head = params.head_weight();
  const double* h_last = cache.hidden.data() + steps * h;
  double y = params.head_bias();
  for (std::size_t j = 0; j < h; ++j) y += head[j] * h_last[j];
  cache.prediction = y;
}

ForwardCache lstm_forward(const LstmParams& params, std::span<const double> window) {
  if (!params.all_finite()) throw Error(ErrorCode::NonFiniteParams, "lstm_forward: non-finite parameter");
  if (params.input_dim() == 0 || window.empty() || window.size() % params.input_dim() != 0) {
    throw Error(ErrorCode::BadInput, "lstm_forward: window must hold a positive number of steps");
  }
  ForwardCache cache;
  lstm_forward_unchecked(params, window, cache);
  return cache;
}

void lstm_accumulate_gradient(const LstmParams& params, const ForwardCache& cache, double target,
                              double weight, LstmParams& grad) {
  const std::size_t d = params.input_dim();
  const std::size_t h = params.hidden();
  const std::size_t steps = cache.steps;

  const double dy = 2.0 * weight * (cache.prediction - target);
  if (dy == 0.0) return;

  const auto head = params.head_weight();
  auto g_head = grad.head_weight();
  const double* h_last = cache.hidden.data() + steps * h;
  for (std::size_t j = 0; j < h; ++j) g_head[j] += dy * h_last[j];
  grad.head_bias() += dy;

  const auto wh = params.recurrent_weights();
  auto g_wx = grad.input_weights();
  auto g_wh = grad.recurrent_weights();
  auto g_b = grad.gate_bias();

  std::vector<double> dh(h), dc(h, 0.0), dz(4 * h);
  for (std::size_t j = 0; j < h; ++j) dh[j] = dy * head[j];

  for (std::size_t t = steps; t-- > 0;) {
    const double* gates = cache.gates.data() + t * 4 * h;
    const double* c = cache.cell.data() + (t + 1) * h;
    const double* c_prev = cache.cell.data() + t * h;
    const double* h_prev = cache.hidden.data() + t * h;
    const double* x = cache.inputs.data() + t * d;

    for (std::size_t j = 0; j < h; ++j) {
      const double ig = gates[j], fg = gates[h + j], og = gates[2 * h + j], gg = gates[3 * h + j];
      const double tc = std::tanh(c[j]);
      const double d_o = dh[j] * tc;
      dc[j] += dh[j] * og * (1.0 - tc * tc);
      dz[j] = dc[j] * gg * ig * (1.0 - ig);
      dz[h + j] = dc[j] * c_prev[j] * fg * (1.0 - fg);
      dz[2 * h + j] = d_o * og * (1.0 - og);
      dz[3 * h + j] = dc[j] * ig * (1.0 - gg * gg);
      dc[j] *= fg;
    }

    std::fill(dh.begin(), dh.end(), 0.0);
    for (std::size_t r = 0; r < 4 * h; ++r) {
      const double g = dz[r];
      g_b[r] += g;
      double* gwx_row = g_wx.data() + r * d;
      for (std::size_t k = 0; k < d; ++k) gwx_row[k] += g * x[k];
      double* gwh_row = g_wh.data() + r * h;
      const double* wh_row = wh.data() + r * h;
      for (std::size_t k = 0; k < h; ++k) {
        gwh_row[k] += g * h_prev[k];
        dh[k] += wh_row[k] * g;
      }
    }
  }
}

LstmParams lstm_backward(const LstmParams& params, std::span<const double> window, double target) {
  const auto cache = lstm_forward(params, window);
  LstmParams grad(params.input_dim(), params.hidden());
  lstm_accumulate_gradient(params, cache, target, 1.0, grad);
  return grad;
}

}  // namespace nevsim::forecast
