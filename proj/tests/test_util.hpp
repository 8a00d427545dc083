#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "otd/rng.hpp"
#include "otd/trace.hpp"

namespace otd_test {

/// Unique scratch directory under the working directory, removed on scope
/// exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::current_path() /
            ("tmp_" + tag + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Random in-range trace on the 0.1 s grid.
inline otd::CanTrace random_trace(std::uint64_t seed, std::size_t n,
                                  double t0 = 0.0) {
  otd::Rng rng(seed);
  otd::CanTrace trace;
  trace.truck_id = "t" + std::to_string(seed % 5 + 1);
  trace.file_id = "file" + std::to_string(seed);
  for (std::size_t i = 0; i < n; ++i) {
    otd::Sample s;
    s.t = t0 + static_cast<double>(i) * otd::kSamplePeriodS;
    for (int c = 0; c < otd::kNumContinuous; ++c) {
      const auto& d = otd::kSignalCatalog[static_cast<std::size_t>(c)];
      s.cont[static_cast<std::size_t>(c)] = rng.uniform(d.min, d.max);
    }
    for (int c = 0; c < otd::kNumCategorical; ++c)
      s.cat[static_cast<std::size_t>(c)] = rng.bernoulli(0.3) ? 1 : 0;
    trace.samples.push_back(s);
  }
  return trace;
}

/// Two Gaussian blobs in d dimensions, class means at +/- separation/2 on
/// every coordinate.
struct Blobs {
  std::vector<double> X;
  std::vector<int> y;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

inline Blobs make_blobs(std::size_t rows_per_class, std::size_t cols,
                        double separation, std::uint64_t seed) {
  Blobs b;
  b.cols = cols;
  otd::Rng rng(seed);
  for (std::size_t r = 0; r < 2 * rows_per_class; ++r) {
    const int label = r < rows_per_class ? 0 : 1;
    const double mean = (label == 1 ? 0.5 : -0.5) * separation;
    for (std::size_t c = 0; c < cols; ++c) b.X.push_back(rng.normal(mean, 1.0));
    b.y.push_back(label);
  }
  b.rows = 2 * rows_per_class;
  return b;
}

}  // namespace otd_test
