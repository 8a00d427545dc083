#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace otd::svm {

enum class Kernel { Linear, Rbf };

/// Two-parameter sigmoid mapping decision values to posteriors:
/// p(f) = 1 / (1 + exp(a*f + b)). Fitted a is non-positive, so the mapping
/// is monotone nondecreasing in f.
struct SigmoidCalibrator {
  double a = -1.0;
  double b = 0.0;

  double posterior(double decision) const;

  /// Platt scaling with the Lin-Weng-Keerthi Newton fit on (decision, label)
  /// pairs from the training set.
  static SigmoidCalibrator fit(std::span<const double> decisions,
                               std::span<const int> labels);
};

struct Model {
  Kernel kernel = Kernel::Linear;
  double gamma = 0.0;  // rbf only

  // Linear: primal weights and bias.
  std::vector<double> weights;
  double bias = 0.0;

  // Rbf: support vectors (row-major) with coefficients alpha_i * y_i.
  std::size_t dim = 0;
  std::vector<double> sv_data;
  std::vector<double> sv_coef;

  SigmoidCalibrator calibrator;
  bool converged = false;
  long long iterations = 0;

  double decision(std::span<const double> row) const;
  double posterior(std::span<const double> row) const;
};

struct TrainSettings {
  Kernel kernel = Kernel::Linear;
  double c = 1.0;
  double gamma = 0.0;  // 0 means 1/d
  long long max_iterations = 1'000'000;  // coordinate updates
  double tolerance = 1e-4;               // max projected-gradient violation
};

/// L1-loss SVM trained by dual coordinate descent. The bias is handled by
/// augmenting with a constant feature (linear) or adding 1 to the kernel
/// (rbf). Coordinate order is a seeded permutation per epoch.
Model train(std::span<const double> X, std::size_t rows, std::size_t cols,
            std::span<const int> y, const TrainSettings& settings, std::uint64_t seed);

}  // namespace otd::svm
