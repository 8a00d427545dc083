#include "otd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <memory>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "otd/rng.hpp"
#include "otd/trace_io.hpp"

namespace otd {
namespace {

using nlohmann::json;

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(std::uint64_t h, const char* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= kFnvPrime;
  }
  return h;
}

std::string cell_name(const SweepCell& cell) {
  std::string name = "run_s" + format_double(cell.crop.start_s) + "_e" +
                     format_double(cell.crop.end_s) + "_w" +
                     format_double(cell.window.w_s);
  if (cell.window.w_s > 0.0) name += "_" + to_string(cell.window.mode);
  name += "_" + to_string(cell.classifier);
  return name;
}

std::string opt_str(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string{};
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

json counts_json(const ConfusionCounts& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

json metrics_json(const TruckMetrics& m) {
  json j = counts_json(m.counts);
  j["tpr"] = m.tpr ? json(*m.tpr) : json();
  j["tnr"] = m.tnr ? json(*m.tnr) : json();
  return j;
}

std::string report_json_text(const MetricReport& report) {
  json j;
  j["sample_auc"] = report.sample_auc;
  j["file_auc"] = report.file_auc;
  j["pooled"] = metrics_json(report.file_report.pooled);
  json trucks = json::object();
  for (const auto& [truck, m] : report.file_report.per_truck)
    trucks[truck] = metrics_json(m);
  j["per_truck"] = std::move(trucks);
  json timepoints = json::array();
  for (const auto& [t, c] : report.per_timepoint) {
    json jt = counts_json(c);
    jt["t"] = t;
    timepoints.push_back(std::move(jt));
  }
  j["per_timepoint"] = std::move(timepoints);
  j["file_scores"] = report.file_scores;
  return j.dump(2);
}

}  // namespace

StackedFeatures featurize_files(const DatasetManifest& manifest,
                                std::span<const std::size_t> indices,
                                const CropConfig& crop_cfg,
                                const WindowConfig& window_cfg) {
  if (indices.empty()) throw HarnessError("no files to featurize");
  StackedFeatures out;
  out.file_row_begin.push_back(0);
  for (std::size_t idx : indices) {
    if (idx >= manifest.entries.size())
      throw HarnessError("file index " + std::to_string(idx) +
                         " is out of manifest range");
    const ManifestEntry& entry = manifest.entries[idx];
    CanTrace trace = load_trace(manifest.resolve(entry));
    if (!trace.is_logged_segment())
      throw HarnessError(entry.path + " is not a logged [-20, +45] segment");
    LoggedSegment segment{std::move(trace)};
    const auto slice = crop(segment, crop_cfg);
    FeatureMatrix fm = featurize(slice, window_cfg);

    const int label = label_value(entry.label);
    const std::size_t local_file = out.file_count();
    for (std::size_t r = 0; r < fm.rows; ++r) {
      out.y.push_back(label);
      out.file_of_row.push_back(local_file);
      out.time_of_row.push_back(fm.time_centers[r]);
    }
    out.X.append(fm);
    out.file_row_begin.push_back(out.X.rows);
    out.manifest_index.push_back(idx);
    out.file_truck.push_back(entry.truck);
    out.file_label.push_back(label);
  }
  return out;
}

MetricReport evaluate_scores(std::span<const double> row_scores,
                             const StackedFeatures& test) {
  if (row_scores.size() != test.X.rows)
    throw HarnessError("row score count does not match the feature rows");

  MetricReport report;
  report.sample_auc = auc_roc(row_scores, test.y);
  report.per_timepoint = per_timepoint_confusion(row_scores, test.y, test.time_of_row);

  report.file_scores.reserve(test.file_count());
  for (std::size_t f = 0; f < test.file_count(); ++f) {
    const std::size_t begin = test.file_row_begin[f];
    const std::size_t end = test.file_row_begin[f + 1];
    report.file_scores.push_back(
        per_file_score(row_scores.subspan(begin, end - begin)));
  }
  report.file_auc = auc_roc(report.file_scores, test.file_label);
  report.file_roc = roc_points(report.file_scores, test.file_label);
  report.file_report =
      per_truck_report(report.file_scores, test.file_label, test.file_truck);
  return report;
}

MetricReport evaluate_model(const TrainedModel& model, const StackedFeatures& test) {
  return evaluate_scores(model.predict_posterior(test.X), test);
}

void write_report_json(const MetricReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw HarnessError("cannot write report: " + path.string());
  out << report_json_text(report) << '\n';
}

void write_roc_csv(const std::vector<RocPoint>& points,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw HarnessError("cannot write ROC curve: " + path.string());
  out << "fpr,tpr,threshold\n";
  for (const auto& p : points)
    out << format_double(p.fpr) << ',' << format_double(p.tpr) << ','
        << format_double(p.threshold) << '\n';
}

std::size_t SweepGrid::size() const {
  std::size_t windows_times_modes = 0;
  for (double w : window_widths)
    windows_times_modes += w == 0.0 ? 1 : modes.size();
  return crop_starts.size() * crop_ends.size() * windows_times_modes *
         classifiers.size();
}

std::vector<SweepCell> enumerate_cells(const SweepGrid& grid) {
  std::vector<SweepCell> cells;
  for (double start : grid.crop_starts)
    for (double end : grid.crop_ends)
      for (double w : grid.window_widths) {
        const std::size_t mode_count = w == 0.0 ? 1 : grid.modes.size();
        for (std::size_t m = 0; m < mode_count; ++m)
          for (ClassifierKind clf : grid.classifiers) {
            SweepCell cell;
            cell.crop = CropConfig{start, end};
            cell.window = WindowConfig{w, grid.modes.empty() ? FeatureMode::MeanStd
                                                             : grid.modes[m]};
            cell.classifier = clf;
            cells.push_back(cell);
          }
      }
  return cells;
}

std::vector<RunRecord> run_sweep(const DatasetManifest& manifest, const SweepGrid& grid,
                                 const std::filesystem::path& out_dir,
                                 std::size_t workers) {
  const std::vector<SweepCell> cells = enumerate_cells(grid);
  if (cells.empty()) throw HarnessError("empty sweep grid");
  std::filesystem::create_directories(out_dir);

  const SplitPlan plan = balanced_split(manifest, grid.train_ratio, grid.seed);
  if (plan.train_indices.empty()) throw HarnessError("split produced no training files");

  // Featurizations are shared between cells that differ only in classifier.
  struct FeaturePair {
    StackedFeatures train;
    StackedFeatures test;
  };
  std::mutex cache_mutex;
  std::map<std::string, std::shared_ptr<const FeaturePair>> cache;
  auto featurized = [&](const SweepCell& cell) {
    const std::string key = format_double(cell.crop.start_s) + "/" +
                            format_double(cell.crop.end_s) + "/" +
                            format_double(cell.window.w_s) + "/" +
                            to_string(cell.window.mode);
    {
      std::lock_guard lock(cache_mutex);
      if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto pair = std::make_shared<FeaturePair>();
    pair->train = featurize_files(manifest, plan.train_indices, cell.crop, cell.window);
    pair->test = featurize_files(manifest, plan.test_indices, cell.crop, cell.window);
    std::lock_guard lock(cache_mutex);
    return cache.try_emplace(key, std::move(pair)).first->second;
  };

  std::vector<RunRecord> records(cells.size());
  std::atomic<std::size_t> next{0};
  auto run_cell = [&](std::size_t i) {
    RunRecord rec;
    rec.cell = cells[i];
    const std::string name = cell_name(cells[i]);
    try {
      auto features = featurized(cells[i]);
      TrainConfig cfg =
          TrainConfig::defaults(cells[i].classifier, derive_seed(grid.seed, "cell", i));
      TrainedModel model = train(features->train.X, features->train.y, cfg);
      MetricReport report = evaluate_model(model, features->test);

      const auto report_path = out_dir / (name + ".json");
      write_report_json(report, report_path);
      write_roc_csv(report.file_roc, out_dir / (name + "_roc.csv"));
      model.save(out_dir / (name + "_model.json"));

      rec.sample_auc = report.sample_auc;
      rec.file_auc = report.file_auc;
      rec.file_tpr = report.file_report.pooled.tpr;
      rec.file_tnr = report.file_report.pooled.tnr;
      rec.model_hash = hash_file(out_dir / (name + "_model.json"));
      rec.report_hash = hash_file(report_path);
      rec.report_path = report_path.string();
      rec.ok = true;
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
    }
    records[i] = std::move(rec);
  };

  const std::size_t n_workers = std::max<std::size_t>(1, workers);
  if (n_workers == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t t = 0; t < n_workers; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < cells.size();
             i = next.fetch_add(1))
          run_cell(i);
      });
    for (auto& th : pool) th.join();
  }

  write_sweep_summary(records, out_dir / "summary.csv");
  return records;
}

void write_sweep_summary(const std::vector<RunRecord>& records,
                         const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw HarnessError("cannot write sweep summary: " + csv_path.string());
  out << "start_s,end_s,window_s,mode,classifier,ok,sample_auc,file_auc,"
         "file_tpr,file_tnr,model_hash,report_hash,error\n";
  char hex[17];
  for (const auto& r : records) {
    out << format_double(r.cell.crop.start_s) << ',' << format_double(r.cell.crop.end_s)
        << ',' << format_double(r.cell.window.w_s) << ','
        << (r.cell.window.w_s > 0.0 ? to_string(r.cell.window.mode) : std::string{})
        << ',' << to_string(r.cell.classifier) << ',' << (r.ok ? 1 : 0) << ',';
    if (r.ok) {
      out << format_double(r.sample_auc) << ',' << format_double(r.file_auc) << ','
          << opt_str(r.file_tpr) << ',' << opt_str(r.file_tnr) << ',';
      std::snprintf(hex, sizeof(hex), "%016llx",
                    static_cast<unsigned long long>(r.model_hash));
      out << hex << ',';
      std::snprintf(hex, sizeof(hex), "%016llx",
                    static_cast<unsigned long long>(r.report_hash));
      out << hex << ',';
    } else {
      out << ",,,,,,";
    }
    out << csv_quote(r.error) << '\n';
  }
}

std::vector<ShiftResult> shift_experiment(const DatasetManifest& manifest,
                                          const ShiftConfig& config,
                                          std::span<const std::uint64_t> seeds) {
  if (config.base_trucks.empty() || config.shifted_trucks.empty())
    throw HarnessError("shift experiment needs base and shifted truck lists");
  const auto is_base = [&](const std::string& truck) {
    return std::find(config.base_trucks.begin(), config.base_trucks.end(), truck) !=
           config.base_trucks.end();
  };
  const auto is_shifted = [&](const std::string& truck) {
    return std::find(config.shifted_trucks.begin(), config.shifted_trucks.end(),
                     truck) != config.shifted_trucks.end();
  };

  std::vector<ShiftResult> results;
  results.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    const SplitPlan plan = balanced_split(manifest, config.train_ratio, seed);

    std::vector<std::size_t> train_base;
    for (std::size_t idx : plan.train_indices)
      if (is_base(manifest.entries[idx].truck)) train_base.push_back(idx);
    std::vector<std::size_t> test_shifted;
    for (std::size_t idx : plan.test_indices)
      if (is_shifted(manifest.entries[idx].truck)) test_shifted.push_back(idx);
    if (train_base.empty() || test_shifted.empty())
      throw HarnessError("shift experiment split left an empty partition");

    const StackedFeatures test =
        featurize_files(manifest, test_shifted, config.cell.crop, config.cell.window);
    const TrainConfig cfg = TrainConfig::defaults(config.cell.classifier,
                                                  derive_seed(seed, "shift-model"));

    const auto file_counts = [&](const std::vector<std::size_t>& train_indices) {
      const StackedFeatures train_sf = featurize_files(
          manifest, train_indices, config.cell.crop, config.cell.window);
      const TrainedModel model = train(train_sf.X, train_sf.y, cfg);
      const MetricReport report = evaluate_model(model, test);
      return report.file_report.pooled;
    };

    ShiftResult r;
    r.seed = seed;
    const TruckMetrics base_only = file_counts(train_base);
    r.tpr_base_only = base_only.tpr;
    r.tnr_base_only = base_only.tnr;
    const TruckMetrics all = file_counts(plan.train_indices);
    r.tpr_all = all.tpr;
    r.tnr_all = all.tnr;
    results.push_back(r);
  }
  return results;
}

void write_shift_csv(const std::vector<ShiftResult>& results,
                     const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw HarnessError("cannot write shift results: " + csv_path.string());
  out << "seed,tpr_base_only,tnr_base_only,tpr_all,tnr_all\n";
  for (const auto& r : results)
    out << r.seed << ',' << opt_str(r.tpr_base_only) << ',' << opt_str(r.tnr_base_only)
        << ',' << opt_str(r.tpr_all) << ',' << opt_str(r.tnr_all) << '\n';
}

std::uint64_t hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw HarnessError("cannot hash missing file: " + path.string());
  std::uint64_t h = kFnvOffset;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    h = fnv1a(h, buf, static_cast<std::size_t>(in.gcount()));
    if (!in) break;
  }
  return h;
}

}  // namespace otd
