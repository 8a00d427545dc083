#include "otd/features.hpp"

#include <cmath>

namespace otd {
namespace {

bool is_one_of(double v, std::initializer_list<double> set) {
  for (double s : set)
    if (v == s) return true;
  return false;
}

}  // namespace

std::string to_string(FeatureMode mode) {
  return mode == FeatureMode::MeanStd ? "mean_std" : "mean";
}

FeatureMode feature_mode_from_string(const std::string& name) {
  if (name == "mean") return FeatureMode::MeanOnly;
  if (name == "mean_std") return FeatureMode::MeanStd;
  throw FeatureError("unknown feature mode '" + name + "' (mean or mean_std)");
}

void CropConfig::validate() const {
  if (!is_one_of(start_s, {-20.0, -10.0, -5.0}))
    throw FeatureError("starttrigger must be one of {-20, -10, -5}, got " +
                       std::to_string(start_s));
  if (!is_one_of(end_s, {0.0, 1.0, 2.0, 5.0}))
    throw FeatureError("endtrigger must be one of {0, 1, 2, 5}, got " +
                       std::to_string(end_s));
}

std::size_t CropConfig::sample_count() const {
  return static_cast<std::size_t>(std::llround(10.0 * (end_s - start_s))) + 1;
}

void WindowConfig::validate() const {
  if (!is_one_of(w_s, {0.0, 0.5, 1.0, 2.0}))
    throw FeatureError("sliding window must be one of {0, 0.5, 1, 2}, got " +
                       std::to_string(w_s));
}

std::size_t window_length_samples(double w_s) {
  return static_cast<std::size_t>(std::llround(10.0 * w_s)) + 1;
}

std::size_t window_step_samples(double w_s) {
  const std::size_t len = window_length_samples(w_s);
  return (len - 1 + 1) / 2;  // ceil((L-1)/2)
}

std::size_t window_count(std::size_t n, double w_s) {
  if (w_s == 0.0) return n;
  const std::size_t len = window_length_samples(w_s);
  if (n < len)
    throw FeatureError("slice of " + std::to_string(n) +
                       " samples is shorter than one window of " + std::to_string(len));
  return (n - len) / window_step_samples(w_s) + 1;
}

std::vector<Sample> crop(const LoggedSegment& segment, const CropConfig& cfg) {
  cfg.validate();
  const auto first = static_cast<std::size_t>(
      static_cast<std::ptrdiff_t>(segment.trigger_index) +
      std::llround(cfg.start_s / kSamplePeriodS));
  const std::size_t n = cfg.sample_count();
  const auto& samples = segment.trace.samples;
  if (first + n > samples.size())
    throw FeatureError("crop exceeds the logged segment");
  return std::vector<Sample>(samples.begin() + static_cast<std::ptrdiff_t>(first),
                             samples.begin() + static_cast<std::ptrdiff_t>(first + n));
}

void FeatureMatrix::append(const FeatureMatrix& other) {
  if (cols == 0) {
    *this = other;
    return;
  }
  if (other.cols != cols || other.channel_names != channel_names)
    throw FeatureError("cannot append feature matrices with different channel layouts");
  data.insert(data.end(), other.data.begin(), other.data.end());
  time_centers.insert(time_centers.end(), other.time_centers.begin(),
                      other.time_centers.end());
  rows += other.rows;
}

FeatureMatrix featurize(std::span<const Sample> slice, const WindowConfig& wcfg) {
  wcfg.validate();
  if (slice.empty()) throw FeatureError("cannot featurize an empty slice");

  FeatureMatrix m;

  if (wcfg.w_s == 0.0) {
    m.rows = slice.size();
    m.cols = static_cast<std::size_t>(kNumSignals);
    for (const auto& d : kSignalCatalog) {
      m.channel_names.emplace_back(d.name);
      m.channel_continuous.push_back(d.kind == SignalKind::Continuous);
    }
    m.data.reserve(m.rows * m.cols);
    for (const Sample& s : slice) {
      for (double v : s.cont) m.data.push_back(v);
      for (int v : s.cat) m.data.push_back(static_cast<double>(v));
      m.time_centers.push_back(s.t);
    }
    return m;
  }

  const std::size_t len = window_length_samples(wcfg.w_s);
  const std::size_t step = window_step_samples(wcfg.w_s);
  const std::size_t count = window_count(slice.size(), wcfg.w_s);
  const bool with_std = wcfg.mode == FeatureMode::MeanStd;

  for (int i = 0; i < kNumContinuous; ++i)
    m.channel_names.push_back(std::string(kSignalCatalog[static_cast<std::size_t>(i)].name) +
                              "_mean");
  if (with_std)
    for (int i = 0; i < kNumContinuous; ++i)
      m.channel_names.push_back(
          std::string(kSignalCatalog[static_cast<std::size_t>(i)].name) + "_std");
  for (int i = 0; i < kNumCategorical; ++i)
    m.channel_names.push_back(
        std::string(kSignalCatalog[static_cast<std::size_t>(kNumContinuous + i)].name) +
        "_maj");
  m.cols = m.channel_names.size();
  m.channel_continuous.assign(m.cols, true);
  for (int i = 0; i < kNumCategorical; ++i)
    m.channel_continuous[m.cols - 1 - static_cast<std::size_t>(i)] = false;

  m.rows = count;
  m.data.reserve(m.rows * m.cols);
  for (std::size_t w = 0; w < count; ++w) {
    const std::size_t begin = w * step;
    double t_sum = 0.0;
    for (int i = 0; i < kNumContinuous; ++i) {
      double sum = 0.0;
      for (std::size_t k = begin; k < begin + len; ++k)
        sum += slice[k].cont[static_cast<std::size_t>(i)];
      m.data.push_back(sum / static_cast<double>(len));
    }
    if (with_std) {
      for (int i = 0; i < kNumContinuous; ++i) {
        double sum = 0.0;
        for (std::size_t k = begin; k < begin + len; ++k)
          sum += slice[k].cont[static_cast<std::size_t>(i)];
        const double mean = sum / static_cast<double>(len);
        double ss = 0.0;
        for (std::size_t k = begin; k < begin + len; ++k) {
          const double d = slice[k].cont[static_cast<std::size_t>(i)] - mean;
          ss += d * d;
        }
        m.data.push_back(std::sqrt(ss / static_cast<double>(len)));  // population std
      }
    }
    for (int i = 0; i < kNumCategorical; ++i) {
      std::size_t ones = 0;
      for (std::size_t k = begin; k < begin + len; ++k)
        ones += static_cast<std::size_t>(slice[k].cat[static_cast<std::size_t>(i)]);
      const std::size_t zeros = len - ones;
      int majority;
      if (ones > zeros)
        majority = 1;
      else if (zeros > ones)
        majority = 0;
      else  // tie: take the most recent sample's value
        majority = slice[begin + len - 1].cat[static_cast<std::size_t>(i)];
      m.data.push_back(static_cast<double>(majority));
    }
    for (std::size_t k = begin; k < begin + len; ++k) t_sum += slice[k].t;
    m.time_centers.push_back(t_sum / static_cast<double>(len));
  }
  return m;
}

Standardizer Standardizer::fit(const FeatureMatrix& train) {
  if (train.rows == 0) throw FeatureError("cannot fit a standardizer on zero rows");
  Standardizer s;
  s.mean_.assign(train.cols, 0.0);
  s.std_.assign(train.cols, 1.0);
  s.active_.assign(train.channel_continuous.begin(), train.channel_continuous.end());
  if (s.active_.size() != train.cols) s.active_.assign(train.cols, true);

  for (std::size_t c = 0; c < train.cols; ++c) {
    if (!s.active_[c]) continue;
    double sum = 0.0;
    for (std::size_t r = 0; r < train.rows; ++r) sum += train.at(r, c);
    const double mean = sum / static_cast<double>(train.rows);
    double ss = 0.0;
    for (std::size_t r = 0; r < train.rows; ++r) {
      const double d = train.at(r, c) - mean;
      ss += d * d;
    }
    const double var =
        train.rows > 1 ? ss / static_cast<double>(train.rows - 1) : 0.0;
    if (!(var > 0.0))
      throw FeatureError("zero-variance channel '" + train.channel_names[c] +
                         "' cannot be standardized");
    s.mean_[c] = mean;
    s.std_[c] = std::sqrt(var);
  }
  return s;
}

void Standardizer::apply(FeatureMatrix& rows) const {
  if (rows.cols != mean_.size())
    throw FeatureError("standardizer dimension mismatch");
  for (std::size_t r = 0; r < rows.rows; ++r)
    for (std::size_t c = 0; c < rows.cols; ++c)
      if (active_[c]) rows.at(r, c) = (rows.at(r, c) - mean_[c]) / std_[c];
}

std::vector<double> Standardizer::apply_row(std::span<const double> row) const {
  if (row.size() != mean_.size())
    throw FeatureError("standardizer dimension mismatch");
  std::vector<double> out(row.begin(), row.end());
  for (std::size_t c = 0; c < out.size(); ++c)
    if (active_[c]) out[c] = (out[c] - mean_[c]) / std_[c];
  return out;
}

Standardizer Standardizer::from_state(std::vector<double> mean, std::vector<double> std,
                                      std::vector<bool> active) {
  Standardizer s;
  s.mean_ = std::move(mean);
  s.std_ = std::move(std);
  s.active_ = std::move(active);
  return s;
}

}  // namespace otd
