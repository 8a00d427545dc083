#include "otd/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "otd/rng.hpp"

namespace otd::forest {
namespace {

struct Builder {
  std::span<const double> X;
  std::size_t cols;
  std::span<const int> y;
  int mtry;
  int min_samples_split;
  Rng* rng;
  Tree* tree;
  std::vector<std::size_t> order;  // scratch for sorting by feature value

  double value(std::size_t row, int feature) const {
    return X[row * cols + static_cast<std::size_t>(feature)];
  }

  // Builds the subtree over rows[lo, hi) and returns its node index.
  int build(std::vector<std::size_t>& rows, std::size_t lo, std::size_t hi) {
    const std::size_t n = hi - lo;
    std::size_t ones = 0;
    for (std::size_t k = lo; k < hi; ++k) ones += static_cast<std::size_t>(y[rows[k]]);

    const int node_index = static_cast<int>(tree->nodes.size());
    tree->nodes.emplace_back();
    tree->nodes.back().p1 = static_cast<double>(ones) / static_cast<double>(n);

    if (ones == 0 || ones == n || n < static_cast<std::size_t>(min_samples_split))
      return node_index;

    // Pick a random feature subset (without replacement).
    std::vector<int> features(cols);
    std::iota(features.begin(), features.end(), 0);
    for (int k = 0; k < mtry; ++k) {
      const auto j = static_cast<std::size_t>(k) +
                     rng->uniform_int(cols - static_cast<std::size_t>(k));
      std::swap(features[static_cast<std::size_t>(k)], features[j]);
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_score = -1.0;  // weighted Gini decrease numerator

    const double total = static_cast<double>(n);
    const double parent_gini =
        1.0 - std::pow(static_cast<double>(ones) / total, 2) -
        std::pow(static_cast<double>(n - ones) / total, 2);

    for (int fk = 0; fk < mtry; ++fk) {
      const int f = features[static_cast<std::size_t>(fk)];
      order.assign(rows.begin() + static_cast<std::ptrdiff_t>(lo),
                   rows.begin() + static_cast<std::ptrdiff_t>(hi));
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = value(a, f), vb = value(b, f);
        return va < vb || (va == vb && a < b);
      });

      std::size_t left_n = 0, left_ones = 0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        ++left_n;
        left_ones += static_cast<std::size_t>(y[order[k]]);
        const double v = value(order[k], f);
        const double v_next = value(order[k + 1], f);
        if (v == v_next) continue;

        const double nl = static_cast<double>(left_n);
        const double nr = static_cast<double>(n - left_n);
        const double pl = static_cast<double>(left_ones) / nl;
        const double pr = static_cast<double>(ones - left_ones) / nr;
        const double gini_l = 1.0 - pl * pl - (1.0 - pl) * (1.0 - pl);
        const double gini_r = 1.0 - pr * pr - (1.0 - pr) * (1.0 - pr);
        const double score = parent_gini - (nl * gini_l + nr * gini_r) / total;
        if (score > best_score) {
          best_score = score;
          best_feature = f;
          // Split at the left value itself (rule: x <= v). Keeping the
          // threshold on a training value makes predictions exactly
          // invariant under strictly monotone per-feature transforms.
          best_threshold = v;
        }
      }
    }

    if (best_feature < 0 || best_score <= 0.0) return node_index;  // no useful split

    // Partition rows in place around the threshold.
    auto mid_it = std::partition(
        rows.begin() + static_cast<std::ptrdiff_t>(lo),
        rows.begin() + static_cast<std::ptrdiff_t>(hi),
        [&](std::size_t r) { return value(r, best_feature) <= best_threshold; });
    const auto mid = static_cast<std::size_t>(mid_it - rows.begin());
    if (mid == lo || mid == hi) return node_index;  // degenerate, keep as leaf

    tree->nodes[static_cast<std::size_t>(node_index)].feature = best_feature;
    tree->nodes[static_cast<std::size_t>(node_index)].threshold = best_threshold;
    const int left = build(rows, lo, mid);
    tree->nodes[static_cast<std::size_t>(node_index)].left = left;
    const int right = build(rows, mid, hi);
    tree->nodes[static_cast<std::size_t>(node_index)].right = right;
    return node_index;
  }
};

}  // namespace

double Tree::predict(std::span<const double> row) const {
  int i = 0;
  while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
    const Node& n = nodes[static_cast<std::size_t>(i)];
    i = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].p1;
}

double Forest::predict(std::span<const double> row) const {
  double sum = 0.0;
  for (const Tree& t : trees) sum += t.predict(row);
  return sum / static_cast<double>(trees.size());
}

Forest train(std::span<const double> X, std::size_t rows, std::size_t cols,
             std::span<const int> y, const TrainSettings& settings, std::uint64_t seed) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("empty training data");
  const int mtry = settings.features_per_split > 0
                       ? settings.features_per_split
                       : std::max(1, static_cast<int>(std::sqrt(static_cast<double>(cols))));

  Forest forest;
  forest.trees.resize(static_cast<std::size_t>(settings.trees));
  for (int t = 0; t < settings.trees; ++t) {
    Rng rng(derive_seed(seed, "tree", static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> sample(rows);
    if (settings.bootstrap) {
      for (auto& r : sample) r = rng.uniform_int(rows);
    } else {
      std::iota(sample.begin(), sample.end(), std::size_t{0});
    }
    Builder b{X, cols, y, mtry, settings.min_samples_split, &rng,
              &forest.trees[static_cast<std::size_t>(t)], {}};
    b.build(sample, 0, sample.size());
  }
  return forest;
}

}  // namespace otd::forest
