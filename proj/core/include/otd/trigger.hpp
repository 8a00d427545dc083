#pragma once

#include <vector>

#include "otd/trace.hpp"

namespace otd {

/// Precondition trigger: all four conditions must hold simultaneously.
/// Thresholds are strict inequalities; the relative-speed test is on the
/// magnitude (the prose threshold and the plotted sign convention disagree,
/// so the sign is not relied upon).
struct TriggerRule {
  double min_speed_kmh = 50.0;
  double max_dist_m = 200.0;
  double min_abs_rel_speed_kmh = 0.1;
  bool lane_change_required = true;
  /// No overlapping logs: once a trigger is accepted, further rising edges
  /// are ignored for this long.
  double refractory_s = 45.0;
};

/// Instantaneous four-condition test on one sample.
bool trigger_condition_holds(const Sample& s, const TriggerRule& rule);

/// Scans a trace for trigger instants: sample times where the conjunction
/// first becomes true (rising edge), subject to the refractory period.
/// Pure and order-deterministic; returns an empty list when nothing fires.
std::vector<double> scan(const CanTrace& trace, const TriggerRule& rule = {});

/// A cropped logged segment re-based to t=0 at the trigger instant.
struct LoggedSegment {
  CanTrace trace;                                // 651 samples over [-20, +45]
  std::size_t trigger_index = kLoggedTriggerIndex;  // always 200
};

class TriggerError : public TraceError {
 public:
  using TraceError::TraceError;
};

/// Extracts the [-20 s, +45 s] window around trigger_time and re-bases time
/// so the trigger sample sits at t=0. Throws TriggerError when the window
/// does not fit inside the trace.
LoggedSegment crop_log(const CanTrace& trace, double trigger_time);

}  // namespace otd
