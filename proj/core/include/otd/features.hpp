#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "otd/trigger.hpp"

namespace otd {

class FeatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Crop extent around the trigger, in seconds. start < 0 <= end.
struct CropConfig {
  double start_s = -5.0;  // one of {-20, -10, -5}
  double end_s = 1.0;     // one of {0, 1, 2, 5}

  void validate() const;
  /// Inclusive-endpoint sample count: 10*(end-start) + 1.
  std::size_t sample_count() const;
};

enum class FeatureMode { MeanOnly, MeanStd };

std::string to_string(FeatureMode mode);
FeatureMode feature_mode_from_string(const std::string& name);

/// Sliding-window setup. w=0 means raw samples (mode is ignored).
/// Windows are L = 10*w + 1 samples with step = ceil((L-1)/2), i.e. 50%
/// overlap with inclusive endpoints; the trailing partial window is dropped.
struct WindowConfig {
  double w_s = 0.0;  // one of {0, 0.5, 1, 2}
  FeatureMode mode = FeatureMode::MeanStd;

  void validate() const;
};

std::size_t window_length_samples(double w_s);
std::size_t window_step_samples(double w_s);

/// Number of feature rows produced from n samples. Throws FeatureError when
/// n is smaller than one window.
std::size_t window_count(std::size_t n, double w_s);

/// Row-major feature matrix with channel metadata. Rows carry the time
/// center of their window for per-time-point analysis.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;             // rows * cols, row-major
  std::vector<std::string> channel_names;
  std::vector<bool> channel_continuous;  // standardizable channels
  std::vector<double> time_centers;      // one per row, seconds

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data).subspan(r * cols, cols);
  }

  /// Appends the rows of another matrix with identical channel layout.
  void append(const FeatureMatrix& other);
};

/// Crops a logged segment to [start, end] around the trigger (inclusive).
std::vector<Sample> crop(const LoggedSegment& segment, const CropConfig& cfg);

/// Converts a sample slice to a feature matrix.
///  - w = 0: rows are the raw samples, 10 channels.
///  - w > 0: per window, mean (and population std for MeanStd) of each
///    continuous signal plus majority vote of each categorical signal;
///    even-split ties resolve to the most recent sample's value.
FeatureMatrix featurize(std::span<const Sample> slice, const WindowConfig& wcfg);

/// Per-channel affine normalization fitted on training rows. Only channels
/// flagged continuous are transformed; categorical/majority channels pass
/// through. Uses the sample standard deviation (n-1).
class Standardizer {
 public:
  Standardizer() = default;

  /// Throws FeatureError on an empty matrix or a zero-variance continuous
  /// channel.
  static Standardizer fit(const FeatureMatrix& train);

  void apply(FeatureMatrix& rows) const;
  std::vector<double> apply_row(std::span<const double> row) const;

  const std::vector<double>& means() const { return mean_; }
  const std::vector<double>& stddevs() const { return std_; }
  const std::vector<bool>& active() const { return active_; }

  /// Reconstructs from serialized state (model files).
  static Standardizer from_state(std::vector<double> mean, std::vector<double> std,
                                 std::vector<bool> active);

 private:
  std::vector<double> mean_;
  std::vector<double> std_;
  std::vector<bool> active_;
};

}  // namespace otd
