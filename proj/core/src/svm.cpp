#include "otd/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "otd/rng.hpp"

namespace otd::svm {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::exp(-gamma * s);
}

// Kernel matrices above this row count are computed on the fly.
constexpr std::size_t kKernelCacheLimit = 2048;

}  // namespace

double SigmoidCalibrator::posterior(double decision) const {
  const double z = a * decision + b;
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

SigmoidCalibrator SigmoidCalibrator::fit(std::span<const double> decisions,
                                         std::span<const int> labels) {
  // Newton fit of the regularized sigmoid likelihood (Lin, Weng, Keerthi).
  const std::size_t n = decisions.size();
  double prior1 = 0.0;
  for (int l : labels) prior1 += l == 1 ? 1.0 : 0.0;
  const double prior0 = static_cast<double>(n) - prior1;

  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = labels[i] == 1 ? hi : lo;

  double a = 0.0;
  double b = std::log((prior0 + 1.0) / (prior1 + 1.0));

  auto objective = [&](double av, double bv) {
    double fval = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fApB = decisions[i] * av + bv;
      if (fApB >= 0.0)
        fval += t[i] * fApB + std::log1p(std::exp(-fApB));
      else
        fval += (t[i] - 1.0) * fApB + std::log1p(std::exp(fApB));
    }
    return fval;
  };

  constexpr int max_iter = 100;
  constexpr double min_step = 1e-10, sigma = 1e-12, eps = 1e-5;
  double fval = objective(a, b);
  for (int it = 0; it < max_iter; ++it) {
    double h11 = sigma, h22 = sigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fApB = decisions[i] * a + b;
      double p, q;
      if (fApB >= 0.0) {
        p = std::exp(-fApB) / (1.0 + std::exp(-fApB));
        q = 1.0 / (1.0 + std::exp(-fApB));
      } else {
        p = 1.0 / (1.0 + std::exp(fApB));
        q = std::exp(fApB) / (1.0 + std::exp(fApB));
      }
      const double d2 = p * q;
      h11 += decisions[i] * decisions[i] * d2;
      h22 += d2;
      h21 += decisions[i] * d2;
      const double d1 = t[i] - p;
      g1 += decisions[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < eps && std::abs(g2) < eps) break;

    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;

    double step = 1.0;
    while (step >= min_step) {
      const double new_a = a + step * da;
      const double new_b = b + step * db;
      const double new_f = objective(new_a, new_b);
      if (new_f < fval + 1e-4 * step * gd) {
        a = new_a;
        b = new_b;
        fval = new_f;
        break;
      }
      step /= 2.0;
    }
    if (step < min_step) break;
  }

  SigmoidCalibrator cal;
  cal.a = std::min(a, 0.0);  // keep posteriors monotone in the decision value
  cal.b = b;
  return cal;
}

double Model::decision(std::span<const double> row) const {
  if (kernel == Kernel::Linear) return dot(weights, row) + bias;
  double s = bias;
  const std::size_t n_sv = sv_coef.size();
  for (std::size_t j = 0; j < n_sv; ++j)
    s += sv_coef[j] *
         rbf_kernel(row, std::span<const double>(sv_data).subspan(j * dim, dim), gamma);
  return s;
}

double Model::posterior(std::span<const double> row) const {
  return calibrator.posterior(decision(row));
}

Model train(std::span<const double> X, std::size_t rows, std::size_t cols,
            std::span<const int> y, const TrainSettings& settings, std::uint64_t seed) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("empty training data");

  Model model;
  model.kernel = settings.kernel;
  model.dim = cols;
  model.gamma = settings.gamma > 0.0 ? settings.gamma : 1.0 / static_cast<double>(cols);

  std::vector<double> ys(rows);
  for (std::size_t i = 0; i < rows; ++i) ys[i] = y[i] == 1 ? 1.0 : -1.0;

  std::vector<double> alpha(rows, 0.0);
  std::vector<double> q_diag(rows);
  const bool linear = settings.kernel == Kernel::Linear;

  std::vector<double> kernel_cache;
  const bool cache = !linear && rows <= kKernelCacheLimit;
  if (cache) kernel_cache.resize(rows * rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto xi = X.subspan(i * cols, cols);
    if (linear) {
      q_diag[i] = dot(xi, xi) + 1.0;  // +1: augmented bias feature
    } else {
      q_diag[i] = 2.0;  // K(x,x)=1, +1 bias term
      if (cache)
        for (std::size_t j = 0; j < rows; ++j)
          kernel_cache[i * rows + j] =
              rbf_kernel(xi, X.subspan(j * cols, cols), model.gamma) + 1.0;
    }
  }

  std::vector<double> w(linear ? cols : 0, 0.0);
  double b = 0.0;  // linear: augmented-bias weight

  auto decision_of = [&](std::size_t i) {
    if (linear) return dot(w, X.subspan(i * cols, cols)) + b;
    double s = 0.0;
    if (cache) {
      const double* krow = &kernel_cache[i * rows];
      for (std::size_t j = 0; j < rows; ++j) s += alpha[j] * ys[j] * krow[j];
    } else {
      const auto xi = X.subspan(i * cols, cols);
      for (std::size_t j = 0; j < rows; ++j) {
        if (alpha[j] == 0.0) continue;
        s += alpha[j] * ys[j] *
             (rbf_kernel(xi, X.subspan(j * cols, cols), model.gamma) + 1.0);
      }
    }
    return s;
  };

  Rng rng(derive_seed(seed, "svm-order"));
  std::vector<std::size_t> index(rows);
  std::iota(index.begin(), index.end(), std::size_t{0});

  long long updates = 0;
  bool converged = false;
  while (updates < settings.max_iterations) {
    // Seeded permutation per epoch.
    for (std::size_t k = 0; k + 1 < rows; ++k) {
      const std::size_t j = k + rng.uniform_int(rows - k);
      std::swap(index[k], index[j]);
    }
    double max_violation = 0.0;
    for (std::size_t k = 0; k < rows && updates < settings.max_iterations; ++k) {
      const std::size_t i = index[k];
      ++updates;
      const double g = ys[i] * decision_of(i) - 1.0;
      double pg = g;
      if (alpha[i] <= 0.0)
        pg = std::min(g, 0.0);
      else if (alpha[i] >= settings.c)
        pg = std::max(g, 0.0);
      max_violation = std::max(max_violation, std::abs(pg));
      if (std::abs(pg) < 1e-12) continue;

      const double old = alpha[i];
      alpha[i] = std::clamp(old - g / q_diag[i], 0.0, settings.c);
      const double delta = (alpha[i] - old) * ys[i];
      if (delta != 0.0 && linear) {
        const auto xi = X.subspan(i * cols, cols);
        for (std::size_t d = 0; d < cols; ++d) w[d] += delta * xi[d];
        b += delta;
      }
    }
    if (max_violation < settings.tolerance) {
      converged = true;
      break;
    }
  }

  model.converged = converged;
  model.iterations = updates;
  if (linear) {
    model.weights = std::move(w);
    model.bias = b;
  } else {
    double bias_sum = 0.0;
    for (std::size_t j = 0; j < rows; ++j) {
      const double coef = alpha[j] * ys[j];
      bias_sum += coef;  // the +1 kernel offset folds into a constant
      if (alpha[j] > 0.0) {
        model.sv_coef.push_back(coef);
        const auto xj = X.subspan(j * cols, cols);
        model.sv_data.insert(model.sv_data.end(), xj.begin(), xj.end());
      }
    }
    model.bias = bias_sum;
  }

  std::vector<double> decisions(rows);
  for (std::size_t i = 0; i < rows; ++i)
    decisions[i] = model.decision(X.subspan(i * cols, cols));
  model.calibrator = SigmoidCalibrator::fit(decisions, y);
  return model;
}

}  // namespace otd::svm
