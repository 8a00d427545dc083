#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "otd/manifest.hpp"

namespace otd {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hold-out split: per truck, floor(ratio * min(class0, class1)) files of
/// each class go to training; everything else is test. Trucks missing one
/// class contribute test-only files.
struct SplitPlan {
  std::vector<std::size_t> train_indices;  // into the manifest's entries
  std::vector<std::size_t> test_indices;
  double ratio = 0.7;
  std::uint64_t seed = 0;
  std::vector<std::string> test_only_trucks;
};

SplitPlan balanced_split(const DatasetManifest& manifest, double ratio = 0.7,
                         std::uint64_t seed = 0);

struct ConfusionCounts {
  long long tp = 0, fp = 0, tn = 0, fn = 0;

  /// Undefined rates (zero denominator) are absent, never 0 or 1.
  std::optional<double> tpr() const {
    return tp + fn > 0 ? std::optional<double>(static_cast<double>(tp) /
                                               static_cast<double>(tp + fn))
                       : std::nullopt;
  }
  std::optional<double> tnr() const {
    return tn + fp > 0 ? std::optional<double>(static_cast<double>(tn) /
                                               static_cast<double>(tn + fp))
                       : std::nullopt;
  }

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }
};

/// Counts at the posterior threshold (class1 iff score > threshold).
ConfusionCounts confusion(std::span<const double> scores, std::span<const int> labels,
                          double threshold = 0.5);

/// AUC-ROC as the Mann-Whitney statistic: P(score_pos > score_neg) plus half
/// credit for ties, computed exactly by ranking. Throws on single-class input.
double auc_roc(std::span<const double> scores, std::span<const int> labels);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

/// Threshold-sweep ROC curve (monotone nondecreasing in both coordinates).
std::vector<RocPoint> roc_points(std::span<const double> scores,
                                 std::span<const int> labels);

/// Trapezoidal area under a threshold-sweep ROC curve; equals auc_roc() on
/// every input up to 1e-9.
double roc_trapezoid_area(const std::vector<RocPoint>& points);

/// One decision score per file: arithmetic mean of its sample scores.
double per_file_score(std::span<const double> sample_scores);

/// One confusion per distinct row time-center (times before the trigger are
/// negative).
std::map<double, ConfusionCounts> per_timepoint_confusion(
    std::span<const double> scores, std::span<const int> labels,
    std::span<const double> times, double threshold = 0.5);

/// Score-level fusion: elementwise arithmetic mean across members.
std::vector<double> fuse(const std::vector<std::vector<double>>& member_scores);

struct TruckMetrics {
  ConfusionCounts counts;
  std::optional<double> tpr;
  std::optional<double> tnr;
};

struct PerTruckReport {
  std::map<std::string, TruckMetrics> per_truck;
  TruckMetrics pooled;  // the "all" column: sum of per-truck counts
};

PerTruckReport per_truck_report(std::span<const double> scores,
                                std::span<const int> labels,
                                std::span<const std::string> trucks,
                                double threshold = 0.5);

}  // namespace otd
