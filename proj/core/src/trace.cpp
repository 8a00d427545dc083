#include "otd/trace.hpp"

#include <cmath>
#include <string>

namespace otd {

std::string check_sample(const Sample& s) {
  const double grid = s.t / kSamplePeriodS;
  if (std::abs(grid - std::round(grid)) * kSamplePeriodS > kTimeTolerance)
    return "timestamp " + std::to_string(s.t) + " not on the 0.1 s grid";
  for (int i = 0; i < kNumContinuous; ++i) {
    const auto& d = kSignalCatalog[static_cast<std::size_t>(i)];
    if (!(s.cont[static_cast<std::size_t>(i)] >= d.min &&
          s.cont[static_cast<std::size_t>(i)] <= d.max)) {
      return "signal " + std::to_string(d.id) + " (" + std::string(d.name) +
             ") value " + std::to_string(s.cont[static_cast<std::size_t>(i)]) +
             " outside [" + std::to_string(d.min) + ", " + std::to_string(d.max) + "]";
    }
  }
  for (int i = 0; i < kNumCategorical; ++i) {
    const int v = s.cat[static_cast<std::size_t>(i)];
    if (v != 0 && v != 1) {
      const auto& d = kSignalCatalog[static_cast<std::size_t>(kNumContinuous + i)];
      return "signal " + std::to_string(d.id) + " (" + std::string(d.name) +
             ") value " + std::to_string(v) + " not in {0,1}";
    }
  }
  return {};
}

void CanTrace::validate() const {
  if (samples.empty()) throw TraceError("trace has no samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (auto msg = check_sample(samples[i]); !msg.empty())
      throw TraceError("sample " + std::to_string(i) + ": " + msg);
    if (i > 0) {
      const double dt = samples[i].t - samples[i - 1].t;
      if (dt <= 0.0)
        throw TraceError("sample " + std::to_string(i) + ": non-monotone timestamp");
      if (std::abs(dt - kSamplePeriodS) > kTimeTolerance)
        throw TraceError("sample " + std::to_string(i) + ": inter-sample spacing " +
                         std::to_string(dt) + " != 0.1 s");
    }
  }
}

bool CanTrace::is_logged_segment() const {
  return samples.size() == kLoggedSampleCount &&
         std::abs(samples.front().t + kLogPreTriggerS) <= kTimeTolerance &&
         std::abs(samples.back().t - kLogPostTriggerS) <= kTimeTolerance;
}

}  // namespace otd
