#include <doctest.h>

#include <cmath>
#include <vector>

#include "otd/model.hpp"
#include "test_util.hpp"

using namespace otd;
using otd_test::Blobs;
using otd_test::make_blobs;

namespace {

FeatureMatrix to_matrix(const Blobs& b) {
  FeatureMatrix m;
  m.rows = b.rows;
  m.cols = b.cols;
  m.data = b.X;
  for (std::size_t c = 0; c < b.cols; ++c) {
    m.channel_names.push_back("f" + std::to_string(c));
    m.channel_continuous.push_back(true);
  }
  m.time_centers.assign(b.rows, 0.0);
  return m;
}

double accuracy(const TrainedModel& model, const FeatureMatrix& X,
                const std::vector<int>& y) {
  std::size_t hits = 0;
  for (std::size_t r = 0; r < X.rows; ++r)
    if (decide(model.score_row(X.row(r))) == y[r]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(X.rows);
}

/// Independent recursive tree walk used as the prediction oracle.
double oracle_tree(const forest::Tree& tree, std::span<const double> row, int node) {
  const forest::Node& n = tree.nodes[static_cast<std::size_t>(node)];
  if (n.is_leaf()) return n.p1;
  return row[static_cast<std::size_t>(n.feature)] <= n.threshold
             ? oracle_tree(tree, row, n.left)
             : oracle_tree(tree, row, n.right);
}

}  // namespace

TEST_CASE("classifier kind names round trip") {
  for (auto kind : {ClassifierKind::Ann, ClassifierKind::RandomForest,
                    ClassifierKind::SvmLinear, ClassifierKind::SvmRbf})
    CHECK(classifier_kind_from_string(to_string(kind)) == kind);
  CHECK_THROWS_AS(classifier_kind_from_string("knn"), LearnerError);
}

TEST_CASE("decide is strict at the threshold") {
  CHECK(decide(0.5) == 0);
  CHECK(decide(std::nextafter(0.5, 1.0)) == 1);
  CHECK(decide(std::nextafter(0.5, 0.0)) == 0);
  CHECK(decide(0.0) == 0);
  CHECK(decide(1.0) == 1);
}

TEST_CASE("all four classifiers separate Gaussian blobs") {
  const Blobs train_b = make_blobs(100, 5, 4.0, 1);
  const Blobs probe_b = make_blobs(100, 5, 4.0, 2);
  const FeatureMatrix train_m = to_matrix(train_b);
  const FeatureMatrix probe_m = to_matrix(probe_b);

  for (auto kind : {ClassifierKind::Ann, ClassifierKind::RandomForest,
                    ClassifierKind::SvmLinear, ClassifierKind::SvmRbf}) {
    CAPTURE(to_string(kind));
    const TrainedModel model = train(train_m, train_b.y, TrainConfig::defaults(kind, 3));
    CHECK(accuracy(model, train_m, train_b.y) >= 0.99);

    // Posterior orientation: class-1 probes score high, class-0 probes low,
    // and agreement with the nearest centroid is near-perfect.
    std::size_t centroid_hits = 0;
    for (std::size_t r = 0; r < probe_m.rows; ++r) {
      const auto row = probe_m.row(r);
      double sum = 0.0;
      for (double v : row) sum += v;
      const int nearest = sum > 0.0 ? 1 : 0;
      if (decide(model.score_row(row)) == nearest) ++centroid_hits;
    }
    CHECK(static_cast<double>(centroid_hits) / static_cast<double>(probe_m.rows) >= 0.98);
  }
}

TEST_CASE("posteriors stay in [0,1]") {
  const Blobs b = make_blobs(50, 3, 3.0, 5);
  const FeatureMatrix m = to_matrix(b);
  for (auto kind : {ClassifierKind::Ann, ClassifierKind::RandomForest,
                    ClassifierKind::SvmLinear, ClassifierKind::SvmRbf}) {
    const TrainedModel model = train(m, b.y, TrainConfig::defaults(kind, 9));
    Rng rng(4);
    for (int i = 0; i < 200; ++i) {
      std::vector<double> row(3);
      for (double& v : row) v = rng.uniform(-50.0, 50.0);  // far outside training range
      const double s = model.score_row(row);
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }
  }
}

TEST_CASE("training rejects degenerate inputs") {
  const Blobs b = make_blobs(10, 3, 3.0, 6);
  FeatureMatrix m = to_matrix(b);
  const TrainConfig cfg = TrainConfig::defaults(ClassifierKind::RandomForest, 0);

  CHECK_THROWS_AS(train(FeatureMatrix{}, {}, cfg), LearnerError);
  std::vector<int> short_y(b.rows - 1, 0);
  CHECK_THROWS_AS(train(m, short_y, cfg), LearnerError);
  std::vector<int> one_class(b.rows, 1);
  CHECK_THROWS_AS(train(m, one_class, cfg), LearnerError);

  const TrainedModel model = train(m, b.y, cfg);
  std::vector<double> wrong_dim(5, 0.0);
  CHECK_THROWS_AS(model.score_row(wrong_dim), LearnerError);
}

TEST_CASE("training is deterministic in the seed") {
  const Blobs b = make_blobs(40, 4, 2.0, 7);
  const FeatureMatrix m = to_matrix(b);
  for (auto kind : {ClassifierKind::Ann, ClassifierKind::RandomForest,
                    ClassifierKind::SvmLinear, ClassifierKind::SvmRbf}) {
    CAPTURE(to_string(kind));
    const auto a = train(m, b.y, TrainConfig::defaults(kind, 42)).to_json_string();
    const auto c = train(m, b.y, TrainConfig::defaults(kind, 42)).to_json_string();
    CHECK(a == c);
  }
  const auto s1 = train(m, b.y, TrainConfig::defaults(ClassifierKind::Ann, 1));
  const auto s2 = train(m, b.y, TrainConfig::defaults(ClassifierKind::Ann, 2));
  CHECK(s1.to_json_string() != s2.to_json_string());
}

TEST_CASE("model JSON round trip preserves every score") {
  const Blobs b = make_blobs(40, 4, 3.0, 8);
  const FeatureMatrix m = to_matrix(b);
  otd_test::TempDir dir("models");
  for (auto kind : {ClassifierKind::Ann, ClassifierKind::RandomForest,
                    ClassifierKind::SvmLinear, ClassifierKind::SvmRbf}) {
    CAPTURE(to_string(kind));
    const TrainedModel model = train(m, b.y, TrainConfig::defaults(kind, 11));
    const auto path = dir.path() / (to_string(kind) + ".json");
    model.save(path);
    const TrainedModel loaded = TrainedModel::load(path);
    CHECK(loaded.kind() == model.kind());
    for (std::size_t r = 0; r < m.rows; ++r)
      CHECK(loaded.score_row(m.row(r)) == model.score_row(m.row(r)));
  }
  CHECK_THROWS_AS(TrainedModel::load(dir.path() / "missing.json"), LearnerError);
  CHECK_THROWS_AS(TrainedModel::from_json_string("{not json"), LearnerError);
}

TEST_CASE("ann analytic gradient matches central differences") {
  const Blobs b = make_blobs(20, 3, 1.0, 12);
  std::vector<double> y(b.y.begin(), b.y.end());

  ann::Network net;
  net.input_dim = 3;
  net.hidden = 4;
  net.params.resize(ann::Network::param_count(3, 4));
  Rng rng(13);
  // Offsets keep ReLU inputs away from the kink, where the analytic and
  // numeric derivatives legitimately differ.
  for (double& p : net.params) p = rng.uniform(0.2, 1.0) * (rng.bernoulli(0.5) ? 1 : -1);

  const auto grad = ann::gradient(net, b.X, b.rows, y);
  const double h = 1e-6;
  double max_rel = 0.0;
  for (std::size_t i = 0; i < net.params.size(); ++i) {
    ann::Network plus = net, minus = net;
    plus.params[i] += h;
    minus.params[i] -= h;
    const double numeric =
        (ann::loss(plus, b.X, b.rows, y) - ann::loss(minus, b.X, b.rows, y)) / (2 * h);
    const double denom = std::max({std::abs(grad[i]), std::abs(numeric), 1e-8});
    max_rel = std::max(max_rel, std::abs(grad[i] - numeric) / denom);
  }
  CHECK(max_rel < 1e-4);
}

TEST_CASE("ann converges before the iteration cap on separable data") {
  const Blobs b = make_blobs(60, 4, 4.0, 14);
  std::vector<double> y(b.y.begin(), b.y.end());
  const auto result = ann::train(b.X, b.rows, b.cols, y, ann::TrainSettings{}, 15);
  CHECK(result.converged);
  CHECK(result.iterations < 1'000'000);
  CHECK(result.final_loss < 0.01);
}

TEST_CASE("forest posterior equals the tree-walk oracle") {
  const Blobs b = make_blobs(60, 4, 2.0, 16);
  forest::TrainSettings settings;
  settings.trees = 5;
  const forest::Forest f = forest::train(b.X, b.rows, b.cols, b.y, settings, 17);
  REQUIRE(f.trees.size() == 5);

  Rng rng(18);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> row(4);
    for (double& v : row) v = rng.uniform(-4.0, 4.0);
    double mean = 0.0;
    for (const auto& tree : f.trees) mean += oracle_tree(tree, row, 0);
    mean /= static_cast<double>(f.trees.size());
    CHECK(f.predict(row) == mean);
  }
}

TEST_CASE("forest defaults grow 100 trees") {
  const Blobs b = make_blobs(30, 3, 3.0, 19);
  const forest::Forest f =
      forest::train(b.X, b.rows, b.cols, b.y, forest::TrainSettings{}, 20);
  CHECK(f.trees.size() == 100);
}

TEST_CASE("forest predictions are invariant under monotone feature maps") {
  const Blobs b = make_blobs(50, 3, 2.0, 21);
  auto transform = [](double v, std::size_t c) {
    switch (c % 3) {
      case 0: return v * v * v;              // odd cube, increasing
      case 1: return std::exp(0.5 * v);      // increasing
      default: return 2.0 * v - 7.0;         // affine increasing
    }
  };
  Blobs tb = b;
  for (std::size_t r = 0; r < b.rows; ++r)
    for (std::size_t c = 0; c < b.cols; ++c)
      tb.X[r * b.cols + c] = transform(b.X[r * b.cols + c], c);

  forest::TrainSettings settings;
  settings.trees = 25;
  const auto f1 = forest::train(b.X, b.rows, b.cols, b.y, settings, 22);
  const auto f2 = forest::train(tb.X, tb.rows, tb.cols, tb.y, settings, 22);

  Rng rng(23);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> row(3), trow(3);
    for (std::size_t c = 0; c < 3; ++c) {
      row[c] = rng.uniform(-4.0, 4.0);
      trow[c] = transform(row[c], c);
    }
    CHECK(f1.predict(row) == f2.predict(trow));
  }
}

TEST_CASE("svm sigmoid calibration is monotone with a <= 0") {
  Rng rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> decisions;
    std::vector<int> labels;
    const bool informative = trial % 2 == 0;
    for (int i = 0; i < 60; ++i) {
      const int label = rng.bernoulli(0.5) ? 1 : 0;
      const double d = informative ? rng.normal(label == 1 ? 1.0 : -1.0, 0.7)
                                   : rng.normal(0.0, 1.0);
      decisions.push_back(d);
      labels.push_back(label);
    }
    const auto cal = svm::SigmoidCalibrator::fit(decisions, labels);
    CHECK(cal.a <= 0.0);
    double prev = cal.posterior(-10.0);
    for (double f = -10.0; f <= 10.0; f += 0.25) {
      const double p = cal.posterior(f);
      CHECK(p >= prev);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      prev = p;
    }
  }
}

TEST_CASE("linear svm decision matches its primal form") {
  const Blobs b = make_blobs(50, 4, 3.0, 25);
  const svm::Model m = svm::train(b.X, b.rows, b.cols, b.y, svm::TrainSettings{}, 26);
  CHECK(m.converged);
  REQUIRE(m.weights.size() == 4);
  Rng rng(27);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> row(4);
    for (double& v : row) v = rng.uniform(-3.0, 3.0);
    double wx = m.bias;
    for (std::size_t c = 0; c < 4; ++c) wx += m.weights[c] * row[c];
    CHECK(m.decision(row) == doctest::Approx(wx).epsilon(1e-12));
  }
}

TEST_CASE("rbf svm separates a non-linear ring") {
  // Inner cluster class 1, surrounding ring class 0: linearly inseparable.
  Rng rng(28);
  std::vector<double> X;
  std::vector<int> y;
  const std::size_t per_class = 80;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const int label = i < per_class ? 1 : 0;
    const double radius = label == 1 ? rng.uniform(0.0, 0.8) : rng.uniform(1.8, 2.8);
    const double angle = rng.uniform(0.0, 6.283185307179586);
    X.push_back(radius * std::cos(angle));
    X.push_back(radius * std::sin(angle));
    y.push_back(label);
  }
  svm::TrainSettings settings;
  settings.kernel = svm::Kernel::Rbf;
  const svm::Model rbf = svm::train(X, 2 * per_class, 2, y, settings, 29);
  std::size_t hits = 0;
  for (std::size_t r = 0; r < 2 * per_class; ++r) {
    const std::span<const double> row(X.data() + 2 * r, 2);
    if ((rbf.posterior(row) > 0.5 ? 1 : 0) == y[r]) ++hits;
  }
  CHECK(static_cast<double>(hits) / static_cast<double>(2 * per_class) >= 0.98);

  const svm::Model lin = svm::train(X, 2 * per_class, 2, y, svm::TrainSettings{}, 29);
  std::size_t lin_hits = 0;
  for (std::size_t r = 0; r < 2 * per_class; ++r) {
    const std::span<const double> row(X.data() + 2 * r, 2);
    if ((lin.posterior(row) > 0.5 ? 1 : 0) == y[r]) ++lin_hits;
  }
  CHECK(lin_hits < hits);  // the kernel is doing real work
}

TEST_CASE("standardization is applied inside ann and svm models only") {
  // A feature with a huge offset breaks unstandardized margins; RF is
  // scale-free so all four must cope.
  Blobs b = make_blobs(60, 3, 4.0, 30);
  for (std::size_t r = 0; r < b.rows; ++r) b.X[r * b.cols] += 1e6;
  const FeatureMatrix m = to_matrix(b);
  for (auto kind : {ClassifierKind::Ann, ClassifierKind::RandomForest,
                    ClassifierKind::SvmLinear, ClassifierKind::SvmRbf}) {
    CAPTURE(to_string(kind));
    const TrainedModel model = train(m, b.y, TrainConfig::defaults(kind, 31));
    CHECK(accuracy(model, m, b.y) >= 0.99);
  }
}
