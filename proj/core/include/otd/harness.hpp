#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "otd/eval.hpp"
#include "otd/features.hpp"
#include "otd/manifest.hpp"
#include "otd/model.hpp"

namespace otd {

class HarnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Featurized rows for a set of manifest files, stacked into one matrix with
/// enough bookkeeping to aggregate back to files, trucks and time points.
struct StackedFeatures {
  FeatureMatrix X;
  std::vector<int> y;                       // per row
  std::vector<std::size_t> file_of_row;     // per row, local file index
  std::vector<double> time_of_row;          // per row, window time center
  std::vector<std::size_t> file_row_begin;  // per file + sentinel, offsets into X
  std::vector<std::size_t> manifest_index;  // per file
  std::vector<std::string> file_truck;      // per file
  std::vector<int> file_label;              // per file

  std::size_t file_count() const { return manifest_index.size(); }
};

StackedFeatures featurize_files(const DatasetManifest& manifest,
                                std::span<const std::size_t> indices,
                                const CropConfig& crop_cfg,
                                const WindowConfig& window_cfg);

/// Metrics of one model (or one fused score vector) on one test set.
struct MetricReport {
  double sample_auc = 0.0;
  double file_auc = 0.0;
  PerTruckReport file_report;                       // per-file decisions
  std::map<double, ConfusionCounts> per_timepoint;  // sample decisions per time center
  std::vector<double> file_scores;                  // aligned with StackedFeatures files
  std::vector<RocPoint> file_roc;
};

MetricReport evaluate_scores(std::span<const double> row_scores,
                             const StackedFeatures& test);
MetricReport evaluate_model(const TrainedModel& model, const StackedFeatures& test);

void write_report_json(const MetricReport& report, const std::filesystem::path& path);
void write_roc_csv(const std::vector<RocPoint>& points, const std::filesystem::path& path);

/// Cartesian sweep over crop, window, feature mode and classifier.
struct SweepGrid {
  std::vector<double> crop_starts{-20.0, -10.0, -5.0};
  std::vector<double> crop_ends{0.0, 1.0, 2.0, 5.0};
  std::vector<double> window_widths{0.0, 0.5, 1.0, 2.0};  // 0 = raw samples
  std::vector<FeatureMode> modes{FeatureMode::MeanStd};
  std::vector<ClassifierKind> classifiers{
      ClassifierKind::Ann, ClassifierKind::RandomForest, ClassifierKind::SvmLinear,
      ClassifierKind::SvmRbf};
  double train_ratio = 0.7;
  std::uint64_t seed = 0;

  std::size_t size() const;
};

struct SweepCell {
  CropConfig crop;
  WindowConfig window;
  ClassifierKind classifier = ClassifierKind::RandomForest;
};

/// Cells in deterministic enumeration order (start, end, width, mode,
/// classifier; the last index varies fastest). Width-0 cells collapse the
/// mode axis to a single entry.
std::vector<SweepCell> enumerate_cells(const SweepGrid& grid);

struct RunRecord {
  SweepCell cell;
  bool ok = false;
  std::string error;  // empty when ok
  double sample_auc = 0.0;
  double file_auc = 0.0;
  std::optional<double> file_tpr;
  std::optional<double> file_tnr;
  std::uint64_t model_hash = 0;   // FNV-1a of the serialized model
  std::uint64_t report_hash = 0;  // FNV-1a of the report JSON
  std::string report_path;
};

/// Runs every cell: split, featurize, train, evaluate, write one report JSON
/// and one ROC CSV per cell plus a summary CSV. A failing cell is recorded
/// with ok=false and does not abort the sweep. `workers` bounds the number of
/// concurrent cells; results are identical for any worker count because every
/// cell's seed and output path are fixed up front.
std::vector<RunRecord> run_sweep(const DatasetManifest& manifest, const SweepGrid& grid,
                                 const std::filesystem::path& out_dir,
                                 std::size_t workers = 1);

void write_sweep_summary(const std::vector<RunRecord>& records,
                         const std::filesystem::path& csv_path);

/// Acquisition-shift experiment: train once on the base-condition trucks only
/// and once on all trucks, then compare both on the held-out files of the
/// shifted trucks.
struct ShiftConfig {
  SweepCell cell{CropConfig{-5.0, 1.0}, WindowConfig{2.0, FeatureMode::MeanStd},
                 ClassifierKind::RandomForest};
  std::vector<std::string> base_trucks;
  std::vector<std::string> shifted_trucks;
  double train_ratio = 0.7;
};

struct ShiftResult {
  std::uint64_t seed = 0;
  std::optional<double> tpr_base_only;
  std::optional<double> tnr_base_only;
  std::optional<double> tpr_all;
  std::optional<double> tnr_all;
};

std::vector<ShiftResult> shift_experiment(const DatasetManifest& manifest,
                                          const ShiftConfig& config,
                                          std::span<const std::uint64_t> seeds);

void write_shift_csv(const std::vector<ShiftResult>& results,
                     const std::filesystem::path& csv_path);

/// FNV-1a over a file's bytes; used for run-record artifact hashes.
std::uint64_t hash_file(const std::filesystem::path& path);

}  // namespace otd
