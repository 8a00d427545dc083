// otd: command-line front end for the overtake-detection pipeline.
//
// Exit codes: 0 success, 1 usage error, 2 data/processing error,
// 3 sweep finished with failed cells.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "otd/eval.hpp"
#include "otd/features.hpp"
#include "otd/harness.hpp"
#include "otd/manifest.hpp"
#include "otd/model.hpp"
#include "otd/synthgen.hpp"
#include "otd/trace_io.hpp"
#include "otd/trigger.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitPartialSweep = 3;

struct CellFlags {
  double start = -5.0;
  double end = 1.0;
  double window = 2.0;
  std::string mode = "mean_std";

  void add_to(CLI::App& cmd) {
    cmd.add_option("--start", start, "crop start relative to the trigger, s")
        ->capture_default_str();
    cmd.add_option("--end", end, "crop end relative to the trigger, s")
        ->capture_default_str();
    cmd.add_option("--window", window, "sliding-window width, s (0 = raw samples)")
        ->capture_default_str();
    cmd.add_option("--mode", mode, "window features: mean or mean_std")
        ->capture_default_str();
  }

  otd::CropConfig crop() const { return {start, end}; }
  otd::WindowConfig window_cfg() const {
    return {window, otd::feature_mode_from_string(mode)};
  }
};

std::string opt_pct(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.1f%%", *v * 100.0);
  return buf;
}

void print_report(const otd::MetricReport& report) {
  std::printf("sample AUC %.4f  file AUC %.4f\n", report.sample_auc, report.file_auc);
  std::printf("%-8s %6s %6s %6s %6s %8s %8s\n", "truck", "tp", "fn", "tn", "fp", "TPR",
              "TNR");
  auto line = [](const std::string& name, const otd::TruckMetrics& m) {
    std::printf("%-8s %6lld %6lld %6lld %6lld %8s %8s\n", name.c_str(), m.counts.tp,
                m.counts.fn, m.counts.tn, m.counts.fp, opt_pct(m.tpr).c_str(),
                opt_pct(m.tnr).c_str());
  };
  for (const auto& [truck, m] : report.file_report.per_truck) line(truck, m);
  line("all", report.file_report.pooled);
}

otd::TrainedModel train_on_split(const otd::DatasetManifest& manifest,
                                 const CellFlags& cell, const std::string& classifier,
                                 double ratio, std::uint64_t seed) {
  const otd::SplitPlan plan = otd::balanced_split(manifest, ratio, seed);
  const otd::StackedFeatures train_sf =
      otd::featurize_files(manifest, plan.train_indices, cell.crop(), cell.window_cfg());
  const otd::TrainConfig cfg = otd::TrainConfig::defaults(
      otd::classifier_kind_from_string(classifier), seed);
  return otd::train(train_sf.X, train_sf.y, cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trigger-gated overtake detection on CAN-bus traces"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::size_t workers = 1;
  app.add_option("--seed", seed, "master seed")->capture_default_str();
  app.add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  app.add_option("--workers", workers, "max concurrent sweep cells")
      ->capture_default_str();

  // generate
  auto* gen = app.add_subcommand("generate", "synthesize a labeled trace dataset");
  std::string gen_config;
  gen->add_option("--config", gen_config, "generator config JSON (default: demo set)");

  // scan
  auto* scan_cmd = app.add_subcommand("scan", "list trigger instants of a trace");
  std::string scan_input;
  scan_cmd->add_option("--input", scan_input, "trace CSV")->required();
  double refractory = 45.0;
  scan_cmd->add_option("--refractory", refractory, "re-arm holdoff, s")
      ->capture_default_str();

  // featurize
  auto* feat = app.add_subcommand("featurize", "write feature rows for a dataset");
  std::string feat_manifest, feat_output = "features.csv";
  CellFlags feat_cell;
  feat->add_option("--manifest", feat_manifest, "dataset manifest JSON")->required();
  feat->add_option("--output", feat_output, "output CSV")->capture_default_str();
  feat_cell.add_to(*feat);

  // train
  auto* train_cmd = app.add_subcommand("train", "train one classifier on the train split");
  std::string train_manifest, train_model = "model.json", train_clf = "rf";
  double train_ratio = 0.7;
  CellFlags train_cell;
  train_cmd->add_option("--manifest", train_manifest, "dataset manifest JSON")->required();
  train_cmd->add_option("--model", train_model, "model output path")->capture_default_str();
  train_cmd->add_option("--classifier", train_clf, "ann, rf, svm_linear or svm_rbf")
      ->capture_default_str();
  train_cmd->add_option("--ratio", train_ratio, "train fraction of the smaller class")
      ->capture_default_str();
  train_cell.add_to(*train_cmd);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a model on the test split");
  std::string eval_manifest, eval_model, eval_report = "report.json", eval_roc;
  double eval_ratio = 0.7;
  CellFlags eval_cell;
  eval_cmd->add_option("--manifest", eval_manifest, "dataset manifest JSON")->required();
  eval_cmd->add_option("--model", eval_model, "trained model JSON")->required();
  eval_cmd->add_option("--report", eval_report, "report output path")
      ->capture_default_str();
  eval_cmd->add_option("--roc", eval_roc, "optional ROC CSV output path");
  eval_cmd->add_option("--ratio", eval_ratio, "train fraction used for the split")
      ->capture_default_str();
  eval_cell.add_to(*eval_cmd);

  // fuse
  auto* fuse_cmd = app.add_subcommand("fuse", "evaluate the score-fused model ensemble");
  std::string fuse_manifest, fuse_report = "fused_report.json";
  std::vector<std::string> fuse_models;
  double fuse_ratio = 0.7;
  CellFlags fuse_cell;
  fuse_cmd->add_option("--manifest", fuse_manifest, "dataset manifest JSON")->required();
  fuse_cmd->add_option("--model", fuse_models, "trained model JSON (repeatable)")
      ->required();
  fuse_cmd->add_option("--report", fuse_report, "report output path")
      ->capture_default_str();
  fuse_cmd->add_option("--ratio", fuse_ratio, "train fraction used for the split")
      ->capture_default_str();
  fuse_cell.add_to(*fuse_cmd);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "run the config sweep");
  std::string sweep_manifest;
  std::vector<double> sweep_starts{-20.0, -10.0, -5.0};
  std::vector<double> sweep_ends{0.0, 1.0, 2.0, 5.0};
  std::vector<double> sweep_windows{0.0, 0.5, 1.0, 2.0};
  std::vector<std::string> sweep_modes{"mean_std"};
  std::vector<std::string> sweep_clfs{"ann", "rf", "svm_linear", "svm_rbf"};
  double sweep_ratio = 0.7;
  bool sweep_dry_run = false;
  sweep_cmd->add_option("--manifest", sweep_manifest, "dataset manifest JSON")->required();
  sweep_cmd->add_option("--starts", sweep_starts, "crop starts, s")
      ->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--ends", sweep_ends, "crop ends, s")
      ->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--windows", sweep_windows, "window widths, s")
      ->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--modes", sweep_modes, "feature modes")
      ->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--classifiers", sweep_clfs, "classifier kinds")
      ->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--ratio", sweep_ratio, "train fraction of the smaller class")
      ->capture_default_str();
  sweep_cmd->add_flag("--dry-run", sweep_dry_run, "list cells without running them");

  // shift
  auto* shift_cmd =
      app.add_subcommand("shift", "acquisition-shift experiment over several splits");
  std::string shift_manifest, shift_output = "shift.csv", shift_clf = "rf";
  std::vector<std::string> shift_base, shift_shifted;
  std::size_t shift_runs = 10;
  double shift_ratio = 0.7;
  CellFlags shift_cell;
  shift_cmd->add_option("--manifest", shift_manifest, "dataset manifest JSON")->required();
  shift_cmd->add_option("--base-trucks", shift_base, "trucks of the base condition")
      ->delimiter(',')->required();
  shift_cmd->add_option("--shifted-trucks", shift_shifted, "trucks of the new condition")
      ->delimiter(',')->required();
  shift_cmd->add_option("--runs", shift_runs, "number of split seeds")
      ->capture_default_str();
  shift_cmd->add_option("--classifier", shift_clf, "classifier kind")
      ->capture_default_str();
  shift_cmd->add_option("--ratio", shift_ratio, "train fraction of the smaller class")
      ->capture_default_str();
  shift_cmd->add_option("--output", shift_output, "results CSV path")
      ->capture_default_str();
  shift_cell.add_to(*shift_cmd);

  // report
  auto* report_cmd = app.add_subcommand("report", "print a report JSON as a table");
  std::string report_input;
  report_cmd->add_option("--input", report_input, "report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      otd::GeneratorConfig cfg =
          gen_config.empty() ? otd::GeneratorConfig::demo(out_dir, seed)
                             : otd::GeneratorConfig::from_json_file(gen_config);
      if (!gen_config.empty()) {
        if (cfg.out_dir.empty()) cfg.out_dir = out_dir;
        if (cfg.master_seed == 0) cfg.master_seed = seed;
      }
      const otd::DatasetManifest manifest = otd::generate_dataset(cfg);
      const auto counts = manifest.total_counts();
      std::printf("wrote %zu files (%zu overtake, %zu no-overtake) to %s\n",
                  manifest.entries.size(), counts.class1, counts.class0,
                  cfg.out_dir.string().c_str());
    } else if (scan_cmd->parsed()) {
      const otd::CanTrace trace = otd::load_trace(scan_input);
      otd::TriggerRule rule;
      rule.refractory_s = refractory;
      const auto triggers = otd::scan(trace, rule);
      for (double t : triggers) std::printf("%s\n", otd::format_double(t).c_str());
      std::fprintf(stderr, "%zu trigger(s)\n", triggers.size());
    } else if (feat->parsed()) {
      const otd::DatasetManifest manifest = otd::load_manifest(feat_manifest);
      std::vector<std::size_t> all(manifest.entries.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      const otd::StackedFeatures sf =
          otd::featurize_files(manifest, all, feat_cell.crop(), feat_cell.window_cfg());
      std::ofstream out(feat_output);
      if (!out) throw otd::HarnessError("cannot write " + feat_output);
      out << "file,truck,label,t";
      for (const auto& name : sf.X.channel_names) out << ',' << name;
      out << '\n';
      for (std::size_t r = 0; r < sf.X.rows; ++r) {
        const std::size_t f = sf.file_of_row[r];
        out << manifest.entries[sf.manifest_index[f]].path << ',' << sf.file_truck[f]
            << ',' << sf.file_label[f] << ',' << otd::format_double(sf.time_of_row[r]);
        for (double v : sf.X.row(r)) out << ',' << otd::format_double(v);
        out << '\n';
      }
      std::printf("wrote %zu rows x %zu channels to %s\n", sf.X.rows, sf.X.cols,
                  feat_output.c_str());
    } else if (train_cmd->parsed()) {
      const otd::DatasetManifest manifest = otd::load_manifest(train_manifest);
      const otd::TrainedModel model =
          train_on_split(manifest, train_cell, train_clf, train_ratio, seed);
      model.save(train_model);
      std::printf("trained %s (%zu features, %s) -> %s\n", train_clf.c_str(),
                  model.feature_dim(), model.converged() ? "converged" : "iteration cap",
                  train_model.c_str());
    } else if (eval_cmd->parsed()) {
      const otd::DatasetManifest manifest = otd::load_manifest(eval_manifest);
      const otd::TrainedModel model = otd::TrainedModel::load(eval_model);
      const otd::SplitPlan plan = otd::balanced_split(manifest, eval_ratio, seed);
      const otd::StackedFeatures test = otd::featurize_files(
          manifest, plan.test_indices, eval_cell.crop(), eval_cell.window_cfg());
      const otd::MetricReport report = otd::evaluate_model(model, test);
      otd::write_report_json(report, eval_report);
      if (!eval_roc.empty()) otd::write_roc_csv(report.file_roc, eval_roc);
      print_report(report);
    } else if (fuse_cmd->parsed()) {
      const otd::DatasetManifest manifest = otd::load_manifest(fuse_manifest);
      const otd::SplitPlan plan = otd::balanced_split(manifest, fuse_ratio, seed);
      const otd::StackedFeatures test = otd::featurize_files(
          manifest, plan.test_indices, fuse_cell.crop(), fuse_cell.window_cfg());
      std::vector<std::vector<double>> member_scores;
      for (const auto& path : fuse_models) {
        const otd::TrainedModel model = otd::TrainedModel::load(path);
        member_scores.push_back(model.predict_posterior(test.X));
      }
      const otd::MetricReport report =
          otd::evaluate_scores(otd::fuse(member_scores), test);
      otd::write_report_json(report, fuse_report);
      print_report(report);
    } else if (sweep_cmd->parsed()) {
      const otd::DatasetManifest manifest = otd::load_manifest(sweep_manifest);
      otd::SweepGrid grid;
      grid.crop_starts = sweep_starts;
      grid.crop_ends = sweep_ends;
      grid.window_widths = sweep_windows;
      grid.modes.clear();
      for (const auto& m : sweep_modes)
        grid.modes.push_back(otd::feature_mode_from_string(m));
      grid.classifiers.clear();
      for (const auto& c : sweep_clfs)
        grid.classifiers.push_back(otd::classifier_kind_from_string(c));
      grid.train_ratio = sweep_ratio;
      grid.seed = seed;

      if (sweep_dry_run) {
        const auto cells = otd::enumerate_cells(grid);
        for (const auto& cell : cells)
          std::printf("%s %s w=%s %s %s\n", otd::format_double(cell.crop.start_s).c_str(),
                      otd::format_double(cell.crop.end_s).c_str(),
                      otd::format_double(cell.window.w_s).c_str(),
                      otd::to_string(cell.window.mode).c_str(),
                      otd::to_string(cell.classifier).c_str());
        std::printf("%zu cells\n", cells.size());
        return kExitOk;
      }
      const auto records = otd::run_sweep(manifest, grid, out_dir, workers);
      std::size_t failed = 0;
      for (const auto& r : records)
        if (!r.ok) ++failed;
      std::printf("%zu cells, %zu failed; summary at %s/summary.csv\n", records.size(),
                  failed, out_dir.c_str());
      if (failed > 0) return kExitPartialSweep;
    } else if (shift_cmd->parsed()) {
      const otd::DatasetManifest manifest = otd::load_manifest(shift_manifest);
      otd::ShiftConfig cfg;
      cfg.cell.crop = shift_cell.crop();
      cfg.cell.window = shift_cell.window_cfg();
      cfg.cell.classifier = otd::classifier_kind_from_string(shift_clf);
      cfg.base_trucks = shift_base;
      cfg.shifted_trucks = shift_shifted;
      cfg.train_ratio = shift_ratio;
      std::vector<std::uint64_t> seeds;
      for (std::size_t i = 0; i < shift_runs; ++i) seeds.push_back(seed + i);
      const auto results = otd::shift_experiment(manifest, cfg, seeds);
      otd::write_shift_csv(results, shift_output);
      for (const auto& r : results)
        std::printf("seed %llu: base-only TPR %s TNR %s | all TPR %s TNR %s\n",
                    static_cast<unsigned long long>(r.seed),
                    opt_pct(r.tpr_base_only).c_str(), opt_pct(r.tnr_base_only).c_str(),
                    opt_pct(r.tpr_all).c_str(), opt_pct(r.tnr_all).c_str());
    } else if (report_cmd->parsed()) {
      std::ifstream in(report_input);
      if (!in) throw otd::HarnessError("cannot open " + report_input);
      nlohmann::json j;
      in >> j;
      auto metrics = [](const nlohmann::json& m) {
        otd::TruckMetrics t;
        t.counts = {m.at("tp").get<long long>(), m.at("fp").get<long long>(),
                    m.at("tn").get<long long>(), m.at("fn").get<long long>()};
        t.tpr = t.counts.tpr();
        t.tnr = t.counts.tnr();
        return t;
      };
      otd::MetricReport report;
      report.sample_auc = j.at("sample_auc").get<double>();
      report.file_auc = j.at("file_auc").get<double>();
      report.file_report.pooled = metrics(j.at("pooled"));
      for (const auto& [truck, m] : j.at("per_truck").items())
        report.file_report.per_truck[truck] = metrics(m);
      print_report(report);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitOk;
}
