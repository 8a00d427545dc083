#include <doctest.h>

#include <fstream>

#include "otd/harness.hpp"
#include "otd/synthgen.hpp"
#include "test_util.hpp"

using namespace otd;
using otd_test::TempDir;

namespace {

/// Small two-truck dataset shared by the harness tests.
DatasetManifest make_dataset(const std::filesystem::path& dir, std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.out_dir = dir;
  cfg.master_seed = seed;
  cfg.groups = {
      {"tA", "light", ScenarioKind::Overtake, 10},
      {"tA", "light", ScenarioKind::CruiseFollow, 10},
      {"tB", "heavy", ScenarioKind::Overtake, 10},
      {"tB", "heavy", ScenarioKind::CruiseFollow, 10},
  };
  return generate_dataset(cfg);
}

}  // namespace

TEST_CASE("featurize_files stacks per-file matrices with exact bookkeeping") {
  TempDir dir("stack");
  const DatasetManifest manifest = make_dataset(dir.path() / "d", 3);
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) indices.push_back(i);

  const CropConfig crop_cfg{-5.0, 1.0};
  const WindowConfig window_cfg{2.0, FeatureMode::MeanStd};
  const StackedFeatures sf = featurize_files(manifest, indices, crop_cfg, window_cfg);

  CHECK(sf.file_count() == 40);
  CHECK(sf.X.cols == 17);
  CHECK(sf.X.rows == 40 * 5);  // 61 samples -> 5 windows of 21 samples
  CHECK(sf.file_row_begin.front() == 0);
  CHECK(sf.file_row_begin.back() == sf.X.rows);
  CHECK(sf.y.size() == sf.X.rows);
  CHECK(sf.time_of_row.size() == sf.X.rows);

  for (std::size_t f = 0; f < sf.file_count(); ++f) {
    const auto& entry = manifest.entries[sf.manifest_index[f]];
    CHECK(sf.file_truck[f] == entry.truck);
    CHECK(sf.file_label[f] == label_value(entry.label));
    for (std::size_t r = sf.file_row_begin[f]; r < sf.file_row_begin[f + 1]; ++r) {
      CHECK(sf.file_of_row[r] == f);
      CHECK(sf.y[r] == sf.file_label[f]);
    }
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(featurize_files(manifest, {}, crop_cfg, window_cfg), HarnessError);
    const std::vector<std::size_t> bad{9999};
    CHECK_THROWS_AS(featurize_files(manifest, bad, crop_cfg, window_cfg), HarnessError);
  }
}

TEST_CASE("evaluate_scores aggregates rows to files") {
  // Two files of two rows each; class-1 file scores high.
  StackedFeatures sf;
  sf.X.rows = 4;
  sf.X.cols = 1;
  sf.X.data = {0, 0, 0, 0};
  sf.y = {1, 1, 0, 0};
  sf.file_of_row = {0, 0, 1, 1};
  sf.time_of_row = {-1.0, 0.0, -1.0, 0.0};
  sf.file_row_begin = {0, 2, 4};
  sf.manifest_index = {0, 1};
  sf.file_truck = {"tA", "tA"};
  sf.file_label = {1, 0};

  const std::vector<double> scores{0.9, 0.7, 0.4, 0.2};
  const MetricReport report = evaluate_scores(scores, sf);
  REQUIRE(report.file_scores.size() == 2);
  CHECK(report.file_scores[0] == doctest::Approx(0.8));
  CHECK(report.file_scores[1] == doctest::Approx(0.3));
  CHECK(report.file_auc == 1.0);
  CHECK(report.sample_auc == 1.0);
  CHECK(report.file_report.pooled.tpr == doctest::Approx(1.0));
  CHECK(report.file_report.pooled.tnr == doctest::Approx(1.0));
  CHECK(report.per_timepoint.size() == 2);

  const std::vector<double> short_scores{0.1};
  CHECK_THROWS_AS(evaluate_scores(short_scores, sf), HarnessError);
}

TEST_CASE("cell enumeration covers the full grid once") {
  SweepGrid grid;
  CHECK(grid.size() == 3 * 4 * 4 * 4);  // 192 runs with a single feature mode

  grid.modes = {FeatureMode::MeanOnly, FeatureMode::MeanStd};
  // w=0 ignores the mode axis, so it contributes one entry instead of two.
  CHECK(grid.size() == 3 * 4 * (1 + 2 * 3) * 4);
  const auto cells = enumerate_cells(grid);
  CHECK(cells.size() == grid.size());

  // Deterministic order: classifier varies fastest.
  CHECK(cells[0].classifier == ClassifierKind::Ann);
  CHECK(cells[1].classifier == ClassifierKind::RandomForest);
  CHECK(cells[0].crop.start_s == -20.0);
  CHECK(cells[0].window.w_s == 0.0);
}

TEST_CASE("run_sweep writes per-cell artifacts and a summary") {
  TempDir dir("sweep");
  const DatasetManifest manifest = make_dataset(dir.path() / "d", 7);

  SweepGrid grid;
  grid.crop_starts = {-5.0};
  grid.crop_ends = {1.0};
  grid.window_widths = {2.0};
  grid.classifiers = {ClassifierKind::RandomForest, ClassifierKind::SvmLinear};
  grid.seed = 9;

  const auto out = dir.path() / "runs";
  const auto records = run_sweep(manifest, grid, out, 2);
  REQUIRE(records.size() == 2);
  for (const auto& r : records) {
    CAPTURE(r.error);
    CHECK(r.ok);
    CHECK(r.sample_auc > 0.5);
    CHECK(std::filesystem::exists(r.report_path));
    CHECK(r.model_hash != 0);
  }
  CHECK(std::filesystem::exists(out / "summary.csv"));

  SUBCASE("worker count does not change the results") {
    const auto rerun = run_sweep(manifest, grid, dir.path() / "runs2", 1);
    CHECK(hash_file(out / "summary.csv") == hash_file(dir.path() / "runs2" / "summary.csv"));
    for (std::size_t i = 0; i < records.size(); ++i) {
      CHECK(rerun[i].model_hash == records[i].model_hash);
      CHECK(rerun[i].report_hash == records[i].report_hash);
    }
  }

  SUBCASE("a failing cell is recorded, not fatal") {
    // A -20 crop does not fit a manifest whose traces are fine, but an
    // impossible grid entry (window longer than the crop) must fail cleanly.
    SweepGrid bad = grid;
    bad.crop_ends = {0.0};
    bad.crop_starts = {-5.0};
    bad.window_widths = {2.0, 1.0};  // 51 samples: w=2 needs 21, fits; keep valid
    bad.classifiers = {ClassifierKind::RandomForest};
    // Force a failure instead via a broken manifest entry.
    DatasetManifest broken = manifest;
    broken.entries[0].path = "missing.csv";
    const auto recs = run_sweep(broken, bad, dir.path() / "runs3", 1);
    for (const auto& r : recs) {
      CHECK_FALSE(r.ok);
      CHECK_FALSE(r.error.empty());
    }
    CHECK(std::filesystem::exists(dir.path() / "runs3" / "summary.csv"));
  }
}

TEST_CASE("report json round trips through the writer") {
  TempDir dir("report");
  MetricReport report;
  report.sample_auc = 0.875;
  report.file_auc = 0.9375;
  report.file_report.pooled.counts = {3, 1, 4, 2};
  report.file_scores = {0.25, 0.75};
  report.file_roc = {{0.0, 0.0, 1.5}, {0.5, 1.0, 0.4}, {1.0, 1.0, 0.1}};

  const auto path = dir.path() / "r.json";
  write_report_json(report, path);
  std::ifstream in(path);
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  CHECK(text.find("0.875") != std::string::npos);
  CHECK(text.find("per_truck") != std::string::npos);

  write_roc_csv(report.file_roc, dir.path() / "roc.csv");
  std::ifstream roc(dir.path() / "roc.csv");
  std::string header;
  std::getline(roc, header);
  CHECK(header == "fpr,tpr,threshold");
  std::size_t lines = 0;
  for (std::string line; std::getline(roc, line);) ++lines;
  CHECK(lines == 3);
}

TEST_CASE("hash_file is content-determined") {
  TempDir dir("hash");
  std::ofstream(dir.path() / "a") << "same bytes";
  std::ofstream(dir.path() / "b") << "same bytes";
  std::ofstream(dir.path() / "c") << "other bytes";
  CHECK(hash_file(dir.path() / "a") == hash_file(dir.path() / "b"));
  CHECK(hash_file(dir.path() / "a") != hash_file(dir.path() / "c"));
  CHECK_THROWS_AS(hash_file(dir.path() / "missing"), HarnessError);
}

TEST_CASE("shift experiment trains the two variants per seed") {
  TempDir dir("shift");
  const DatasetManifest manifest = make_dataset(dir.path() / "d", 13);

  ShiftConfig cfg;
  cfg.base_trucks = {"tA"};
  cfg.shifted_trucks = {"tB"};
  const std::vector<std::uint64_t> seeds{1, 2};
  const auto results = shift_experiment(manifest, cfg, seeds);
  REQUIRE(results.size() == 2);
  for (const auto& r : results) {
    CHECK(r.tpr_base_only.has_value());
    CHECK(r.tnr_all.has_value());
  }

  write_shift_csv(results, dir.path() / "shift.csv");
  std::ifstream in(dir.path() / "shift.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "seed,tpr_base_only,tnr_base_only,tpr_all,tnr_all");

  ShiftConfig bad = cfg;
  bad.base_trucks.clear();
  CHECK_THROWS_AS(shift_experiment(manifest, bad, seeds), HarnessError);
}
