#include "otd/ann.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "otd/rng.hpp"

namespace otd::ann {
namespace {

double logistic(double z) {
  // Split form avoids overflow for large |z|.
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct Layout {
  std::size_t w1, b1, w2, b2;
};

Layout layout(int d, int h) {
  const auto hd = static_cast<std::size_t>(h) * static_cast<std::size_t>(d);
  const auto hu = static_cast<std::size_t>(h);
  return {0, hd, hd + hu, hd + 2 * hu};
}

}  // namespace

double Network::score(std::span<const double> row) const {
  const auto lay = layout(input_dim, hidden);
  double z_out = params[lay.b2];
  for (int j = 0; j < hidden; ++j) {
    double z = params[lay.b1 + static_cast<std::size_t>(j)];
    const double* w = &params[lay.w1 + static_cast<std::size_t>(j) *
                                            static_cast<std::size_t>(input_dim)];
    for (int i = 0; i < input_dim; ++i) z += w[i] * row[static_cast<std::size_t>(i)];
    if (z > 0.0) z_out += params[lay.w2 + static_cast<std::size_t>(j)] * z;
  }
  return logistic(z_out);
}

double loss(const Network& net, std::span<const double> X, std::size_t rows,
            std::span<const double> y) {
  const auto cols = static_cast<std::size_t>(net.input_dim);
  double total = 0.0;
  constexpr double eps = 1e-12;  // guards log(0)
  for (std::size_t r = 0; r < rows; ++r) {
    const double p = net.score(X.subspan(r * cols, cols));
    total -= y[r] * std::log(p + eps) + (1.0 - y[r]) * std::log(1.0 - p + eps);
  }
  return total / static_cast<double>(rows);
}

std::vector<double> gradient(const Network& net, std::span<const double> X,
                             std::size_t rows, std::span<const double> y) {
  const int d = net.input_dim;
  const int h = net.hidden;
  const auto cols = static_cast<std::size_t>(d);
  const auto lay = layout(d, h);
  std::vector<double> grad(net.params.size(), 0.0);
  std::vector<double> act(static_cast<std::size_t>(h));

  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = X.subspan(r * cols, cols);
    double z_out = net.params[lay.b2];
    for (int j = 0; j < h; ++j) {
      double z = net.params[lay.b1 + static_cast<std::size_t>(j)];
      const double* w = &net.params[lay.w1 + static_cast<std::size_t>(j) * cols];
      for (int i = 0; i < d; ++i) z += w[i] * row[static_cast<std::size_t>(i)];
      act[static_cast<std::size_t>(j)] = z > 0.0 ? z : 0.0;
      z_out += net.params[lay.w2 + static_cast<std::size_t>(j)] *
               act[static_cast<std::size_t>(j)];
    }
    const double p = logistic(z_out);
    const double delta = p - y[r];  // d(BCE)/d(z_out)

    grad[lay.b2] += delta;
    for (int j = 0; j < h; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      grad[lay.w2 + ju] += delta * act[ju];
      if (act[ju] > 0.0) {
        const double dj = delta * net.params[lay.w2 + ju];
        grad[lay.b1 + ju] += dj;
        double* gw = &grad[lay.w1 + ju * cols];
        for (int i = 0; i < d; ++i) gw[i] += dj * row[static_cast<std::size_t>(i)];
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(rows);
  for (double& g : grad) g *= inv;
  return grad;
}

TrainResult train(std::span<const double> X, std::size_t rows, std::size_t cols,
                  std::span<const double> y, const TrainSettings& settings,
                  std::uint64_t seed) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("empty training data");

  TrainResult result;
  Network& net = result.net;
  net.input_dim = static_cast<int>(cols);
  net.hidden = settings.hidden_units;
  net.params.resize(Network::param_count(net.input_dim, net.hidden));

  Rng rng(seed);
  const double w1_scale = 1.0 / std::sqrt(static_cast<double>(cols));
  const double w2_scale = 1.0 / std::sqrt(static_cast<double>(settings.hidden_units));
  const auto lay = layout(net.input_dim, net.hidden);
  for (std::size_t i = 0; i < lay.b1; ++i) net.params[i] = rng.uniform(-w1_scale, w1_scale);
  for (std::size_t i = lay.b1; i < lay.w2; ++i) net.params[i] = 0.01 * rng.uniform(-1.0, 1.0);
  for (std::size_t i = lay.w2; i < lay.b2; ++i)
    net.params[i] = rng.uniform(-w2_scale, w2_scale);
  net.params[lay.b2] = 0.0;

  // Adam, full batch.
  std::vector<double> m(net.params.size(), 0.0), v(net.params.size(), 0.0);
  constexpr double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  double beta1_t = 1.0, beta2_t = 1.0;

  double window_start_loss = loss(net, X, rows, y);
  double current_loss = window_start_loss;
  long long it = 0;
  for (; it < settings.max_iterations; ++it) {
    const auto grad = gradient(net, X, rows, y);
    beta1_t *= beta1;
    beta2_t *= beta2;
    for (std::size_t i = 0; i < net.params.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
      const double m_hat = m[i] / (1.0 - beta1_t);
      const double v_hat = v[i] / (1.0 - beta2_t);
      net.params[i] -= settings.learning_rate * m_hat / (std::sqrt(v_hat) + adam_eps);
    }
    if ((it + 1) % settings.plateau_window == 0) {
      current_loss = loss(net, X, rows, y);
      const double denom = std::max(std::abs(window_start_loss), 1e-30);
      if (current_loss < settings.loss_floor ||
          (window_start_loss - current_loss) / denom < settings.plateau_tol) {
        result.converged = true;
        ++it;
        break;
      }
      window_start_loss = current_loss;
    }
  }
  result.iterations = it;
  result.final_loss = loss(net, X, rows, y);
  return result;
}

}  // namespace otd::ann
