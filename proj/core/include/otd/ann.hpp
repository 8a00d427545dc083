#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace otd::ann {

/// One-hidden-layer perceptron: d inputs -> h rectified-linear units -> one
/// logistic output. Parameters are kept flat so the trainer and the
/// finite-difference gradient check share the same layout:
///   [W1 (h*d, row per hidden unit), b1 (h), w2 (h), b2 (1)]
struct Network {
  int input_dim = 0;
  int hidden = 0;
  std::vector<double> params;

  static std::size_t param_count(int input_dim, int hidden) {
    return static_cast<std::size_t>(hidden) * static_cast<std::size_t>(input_dim) +
           static_cast<std::size_t>(hidden) + static_cast<std::size_t>(hidden) + 1;
  }

  /// Posterior probability of class 1 for one row.
  double score(std::span<const double> row) const;
};

/// Mean binary cross-entropy over the dataset (rows*cols row-major).
double loss(const Network& net, std::span<const double> X, std::size_t rows,
            std::span<const double> y);

/// Analytic gradient of loss() with respect to the flat parameter vector.
std::vector<double> gradient(const Network& net, std::span<const double> X,
                             std::size_t rows, std::span<const double> y);

struct TrainSettings {
  int hidden_units = 10;
  long long max_iterations = 1'000'000;
  double learning_rate = 0.01;
  /// Stop when the relative loss improvement over this many iterations
  /// falls below plateau_tol, or once the loss itself drops under
  /// loss_floor (separable data never plateaus in relative terms).
  int plateau_window = 50;
  double plateau_tol = 1e-6;
  double loss_floor = 1e-6;
};

struct TrainResult {
  Network net;
  bool converged = false;  // stopped on plateau rather than iteration cap
  long long iterations = 0;
  double final_loss = 0.0;
};

/// Full-batch Adam on the cross-entropy loss. Deterministic given the seed.
TrainResult train(std::span<const double> X, std::size_t rows, std::size_t cols,
                  std::span<const double> y, const TrainSettings& settings,
                  std::uint64_t seed);

}  // namespace otd::ann
