#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace otd::forest {

struct Node {
  int feature = -1;         // -1 marks a leaf
  double threshold = 0.0;   // go left when value <= threshold
  int left = -1;
  int right = -1;
  double p1 = 0.0;          // leaf: fraction of class-1 training rows

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<Node> nodes;  // nodes[0] is the root

  /// Class-1 proportion of the leaf the row falls into.
  double predict(std::span<const double> row) const;
};

struct Forest {
  std::vector<Tree> trees;

  /// Posterior = mean over trees of the leaf class-1 proportion.
  double predict(std::span<const double> row) const;
};

struct TrainSettings {
  int trees = 100;
  bool bootstrap = true;
  /// Features tried per split; 0 means floor(sqrt(d)).
  int features_per_split = 0;
  /// Nodes stop splitting at this size or when pure.
  int min_samples_split = 2;
};

/// Grows a forest on bootstrap resamples with Gini impurity splits over
/// random feature subsets. Per-tree seeds are fixed up front, so the result
/// is deterministic regardless of evaluation order.
Forest train(std::span<const double> X, std::size_t rows, std::size_t cols,
             std::span<const int> y, const TrainSettings& settings, std::uint64_t seed);

}  // namespace otd::forest
