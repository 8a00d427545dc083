#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "otd/ann.hpp"
#include "otd/features.hpp"
#include "otd/forest.hpp"
#include "otd/svm.hpp"

namespace otd {

enum class ClassifierKind { Ann, RandomForest, SvmLinear, SvmRbf };

std::string to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(const std::string& name);

class LearnerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  ClassifierKind kind = ClassifierKind::RandomForest;
  std::uint64_t seed = 0;
  ann::TrainSettings ann{};
  forest::TrainSettings rf{};
  svm::TrainSettings svm{};

  /// Defaults per classifier: ANN 1x10 hidden / 1e6 cap, RF 100 bootstrap
  /// trees, SVM C=1 with gamma=1/d and the raised 1e8 cap for rbf.
  static TrainConfig defaults(ClassifierKind kind, std::uint64_t seed = 0);

  /// Standardization is part of the model for ANN and SVM; RF consumes raw
  /// features.
  bool standardize() const { return kind != ClassifierKind::RandomForest; }
};

/// A fitted classifier exposing the posterior-probability contract: scoring
/// any row yields a value in [0,1]. Immutable and shareable; prediction is
/// reentrant.
class TrainedModel {
 public:
  ClassifierKind kind() const { return kind_; }
  std::size_t feature_dim() const { return feature_dim_; }
  std::uint64_t seed() const { return seed_; }
  bool converged() const { return converged_; }

  double score_row(std::span<const double> row) const;
  std::vector<double> predict_posterior(const FeatureMatrix& X) const;

  std::string to_json_string() const;
  static TrainedModel from_json_string(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static TrainedModel load(const std::filesystem::path& path);

  friend TrainedModel train(const FeatureMatrix& X, const std::vector<int>& y,
                            const TrainConfig& cfg);

  // Fitted-parameter access for oracle tests.
  const forest::Forest* forest_impl() const { return std::get_if<forest::Forest>(&impl_); }
  const ann::Network* ann_impl() const { return std::get_if<ann::Network>(&impl_); }
  const svm::Model* svm_impl() const { return std::get_if<svm::Model>(&impl_); }

 private:
  ClassifierKind kind_ = ClassifierKind::RandomForest;
  std::size_t feature_dim_ = 0;
  std::uint64_t seed_ = 0;
  bool converged_ = true;
  std::optional<Standardizer> standardizer_;
  std::variant<ann::Network, forest::Forest, svm::Model> impl_;
};

/// Trains one classifier. Deterministic given (X, y, cfg.seed). Errors:
/// empty data, single-class labels, dimension mismatch. Non-convergence
/// within the iteration cap is a warning flag, not a failure.
TrainedModel train(const FeatureMatrix& X, const std::vector<int>& y,
                   const TrainConfig& cfg);

/// Posterior threshold rule: class1 iff score > 0.5 (ties go to class0).
inline int decide(double score) { return score > 0.5 ? 1 : 0; }

}  // namespace otd
