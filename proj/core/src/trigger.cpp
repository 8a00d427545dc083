#include "otd/trigger.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace otd {

bool trigger_condition_holds(const Sample& s, const TriggerRule& rule) {
  if (rule.lane_change_required && s.cat[kSigLaneChange] != 1) return false;
  if (!(s.cont[kSigSpeed] > rule.min_speed_kmh)) return false;
  if (!(s.cont[kSigDistAhead] < rule.max_dist_m)) return false;
  if (!(std::abs(s.cont[kSigRelSpeed]) > rule.min_abs_rel_speed_kmh)) return false;
  return true;
}

std::vector<double> scan(const CanTrace& trace, const TriggerRule& rule) {
  std::vector<double> triggers;
  bool prev_held = false;
  double last_accepted = -std::numeric_limits<double>::infinity();
  for (const Sample& s : trace.samples) {
    const bool holds = trigger_condition_holds(s, rule);
    if (holds && !prev_held && s.t - last_accepted >= rule.refractory_s) {
      triggers.push_back(s.t);
      last_accepted = s.t;
    }
    prev_held = holds;
  }
  return triggers;
}

LoggedSegment crop_log(const CanTrace& trace, double trigger_time) {
  const auto& samples = trace.samples;
  if (samples.empty()) throw TriggerError("empty trace");

  // Locate the trigger sample on the 0.1 s grid.
  const double offset = (trigger_time - samples.front().t) / kSamplePeriodS;
  const auto idx = static_cast<std::ptrdiff_t>(std::llround(offset));
  if (idx < 0 || static_cast<std::size_t>(idx) >= samples.size() ||
      std::abs(samples[static_cast<std::size_t>(idx)].t - trigger_time) > kTimeTolerance)
    throw TriggerError("trigger time " + std::to_string(trigger_time) +
                       " does not match a sample");

  const auto pre = static_cast<std::ptrdiff_t>(kLoggedTriggerIndex);
  const auto post = static_cast<std::ptrdiff_t>(kLoggedSampleCount) - pre - 1;
  if (idx - pre < 0 || static_cast<std::size_t>(idx + post) >= samples.size())
    throw TriggerError("logging window [-20, +45] around trigger at t=" +
                       std::to_string(trigger_time) + " does not fit inside the trace");

  LoggedSegment seg;
  seg.trace.truck_id = trace.truck_id;
  seg.trace.file_id = trace.file_id;
  seg.trace.label = trace.label;
  seg.trace.samples.reserve(kLoggedSampleCount);
  for (std::ptrdiff_t k = idx - pre; k <= idx + post; ++k) {
    Sample s = samples[static_cast<std::size_t>(k)];
    s.t = static_cast<double>(k - idx) * kSamplePeriodS;
    seg.trace.samples.push_back(s);
  }
  seg.trigger_index = kLoggedTriggerIndex;
  return seg;
}

}  // namespace otd
