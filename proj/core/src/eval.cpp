#include "otd/eval.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>

#include "otd/rng.hpp"

namespace otd {

SplitPlan balanced_split(const DatasetManifest& manifest, double ratio,
                         std::uint64_t seed) {
  if (manifest.entries.empty()) throw EvalError("empty manifest");

  SplitPlan plan;
  plan.ratio = ratio;
  plan.seed = seed;

  // Group entry indices per truck and class (manifest order, so the plan is
  // a pure function of (manifest, ratio, seed)).
  std::map<std::string, std::array<std::vector<std::size_t>, 2>> groups;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i)
    groups[manifest.entries[i].truck]
          [static_cast<std::size_t>(label_value(manifest.entries[i].label))]
              .push_back(i);

  std::vector<char> in_train(manifest.entries.size(), 0);
  for (auto& [truck, per_class] : groups) {
    const std::size_t n_min = std::min(per_class[0].size(), per_class[1].size());
    const auto n_train =
        static_cast<std::size_t>(ratio * static_cast<double>(n_min));
    if (n_train == 0) {
      plan.test_only_trucks.push_back(truck);
      continue;
    }
    Rng rng(derive_seed(seed, "split-" + truck));
    for (auto& indices : per_class) {
      // Seeded partial Fisher-Yates: the first n_train entries train.
      for (std::size_t k = 0; k < n_train; ++k) {
        const std::size_t j = k + rng.uniform_int(indices.size() - k);
        std::swap(indices[k], indices[j]);
      }
      for (std::size_t k = 0; k < n_train; ++k) in_train[indices[k]] = 1;
    }
  }
  for (std::size_t i = 0; i < manifest.entries.size(); ++i)
    (in_train[i] ? plan.train_indices : plan.test_indices).push_back(i);
  return plan;
}

ConfusionCounts confusion(std::span<const double> scores, std::span<const int> labels,
                          double threshold) {
  if (scores.empty()) throw EvalError("empty score list");
  if (scores.size() != labels.size()) throw EvalError("score/label length mismatch");
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted_positive = scores[i] > threshold;
    if (labels[i] == 1)
      (predicted_positive ? c.tp : c.fn) += 1;
    else
      (predicted_positive ? c.fp : c.tn) += 1;
  }
  return c;
}

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw EvalError("score/label length mismatch");
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (int l : labels) n_pos += l == 1 ? 1u : 0u;
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw EvalError("AUC requires both classes to be present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Midranks give exact half-credit for ties.
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      if (labels[order[k]] == 1) pos_rank_sum += midrank;
    i = j + 1;
  }
  const double u = pos_rank_sum -
                   static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::vector<RocPoint> roc_points(std::span<const double> scores,
                                 std::span<const int> labels) {
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (int l : labels) n_pos += l == 1 ? 1u : 0u;
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw EvalError("ROC requires both classes to be present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> points;
  points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;  // tie group shares one threshold step
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k)
      (labels[order[k]] == 1 ? tp : fp) += 1;
    points.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                      static_cast<double>(tp) / static_cast<double>(n_pos),
                      scores[order[i]]});
    i = j + 1;
  }
  return points;
}

double roc_trapezoid_area(const std::vector<RocPoint>& points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    area += (points[i].fpr - points[i - 1].fpr) * 0.5 *
            (points[i].tpr + points[i - 1].tpr);
  return area;
}

double per_file_score(std::span<const double> sample_scores) {
  if (sample_scores.empty()) throw EvalError("per-file score of an empty file");
  double sum = 0.0;
  for (double s : sample_scores) sum += s;
  return sum / static_cast<double>(sample_scores.size());
}

std::map<double, ConfusionCounts> per_timepoint_confusion(
    std::span<const double> scores, std::span<const int> labels,
    std::span<const double> times, double threshold) {
  if (scores.size() != labels.size() || scores.size() != times.size())
    throw EvalError("scores, labels and times must be aligned");
  std::map<double, ConfusionCounts> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    ConfusionCounts& c = out[times[i]];
    const bool predicted_positive = scores[i] > threshold;
    if (labels[i] == 1)
      (predicted_positive ? c.tp : c.fn) += 1;
    else
      (predicted_positive ? c.fp : c.tn) += 1;
  }
  return out;
}

std::vector<double> fuse(const std::vector<std::vector<double>>& member_scores) {
  if (member_scores.empty()) throw EvalError("fusion needs at least one member");
  const std::size_t n = member_scores.front().size();
  for (const auto& m : member_scores)
    if (m.size() != n) throw EvalError("fusion members have mismatched lengths");
  std::vector<double> fused(n, 0.0);
  for (const auto& m : member_scores)
    for (std::size_t i = 0; i < n; ++i) fused[i] += m[i];
  const double inv = 1.0 / static_cast<double>(member_scores.size());
  for (double& f : fused) f *= inv;
  return fused;
}

PerTruckReport per_truck_report(std::span<const double> scores,
                                std::span<const int> labels,
                                std::span<const std::string> trucks,
                                double threshold) {
  if (scores.size() != labels.size() || scores.size() != trucks.size())
    throw EvalError("scores, labels and truck ids must be aligned");
  PerTruckReport report;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    ConfusionCounts& c = report.per_truck[trucks[i]].counts;
    const bool predicted_positive = scores[i] > threshold;
    if (labels[i] == 1)
      (predicted_positive ? c.tp : c.fn) += 1;
    else
      (predicted_positive ? c.fp : c.tn) += 1;
  }
  for (auto& [truck, metrics] : report.per_truck) {
    metrics.tpr = metrics.counts.tpr();
    metrics.tnr = metrics.counts.tnr();
    report.pooled.counts += metrics.counts;
  }
  report.pooled.tpr = report.pooled.counts.tpr();
  report.pooled.tnr = report.pooled.counts.tnr();
  return report;
}

}  // namespace otd
