#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace otd {

inline constexpr double kSampleRateHz = 10.0;
inline constexpr double kSamplePeriodS = 0.1;
inline constexpr double kTimeTolerance = 1e-9;

/// Log window around the trigger instant: [-20 s, +45 s] at 10 Hz.
inline constexpr double kLogPreTriggerS = 20.0;
inline constexpr double kLogPostTriggerS = 45.0;
inline constexpr std::size_t kLoggedSampleCount = 651;
inline constexpr std::size_t kLoggedTriggerIndex = 200;

/// Distance reading meaning "no vehicle detected ahead".
inline constexpr double kNoVehicleAhead = 255.0;

inline constexpr int kNumContinuous = 7;
inline constexpr int kNumCategorical = 3;
inline constexpr int kNumSignals = 10;

enum class SignalKind { Continuous, Categorical };

struct SignalDescriptor {
  int id;  // 1-based, matches the on-bus signal numbering
  SignalKind kind;
  std::string_view name;
  std::string_view unit;
  double min;
  double max;
};

/// Catalog of the ten logged CAN signals. Signals 1-7 are continuous,
/// 8-10 are activation statuses. Acceleration and relative-speed ranges are
/// generator conventions (the bus encoding does not pin them down).
inline constexpr std::array<SignalDescriptor, kNumSignals> kSignalCatalog{{
    {1, SignalKind::Continuous, "accel_pedal_pct", "%", 0.0, 100.0},
    {2, SignalKind::Continuous, "dist_ahead_m", "m", 0.0, 255.0},
    {3, SignalKind::Continuous, "speed_ahead_kmh", "km/h", 0.0, 255.0},
    {4, SignalKind::Continuous, "rel_speed_kmh", "km/h", -20.0, 20.0},
    {5, SignalKind::Continuous, "speed_kmh", "km/h", 0.0, 255.0},
    {6, SignalKind::Continuous, "lat_acc_ms2", "m/s^2", -10.0, 10.0},
    {7, SignalKind::Continuous, "lon_acc_ms2", "m/s^2", -10.0, 10.0},
    {8, SignalKind::Categorical, "lane_change", "", 0.0, 1.0},
    {9, SignalKind::Categorical, "left_ind", "", 0.0, 1.0},
    {10, SignalKind::Categorical, "right_ind", "", 0.0, 1.0},
}};

// Continuous-signal indices into Sample::cont (signal id minus one).
inline constexpr int kSigAccelPedal = 0;
inline constexpr int kSigDistAhead = 1;
inline constexpr int kSigSpeedAhead = 2;
inline constexpr int kSigRelSpeed = 3;
inline constexpr int kSigSpeed = 4;
inline constexpr int kSigLatAcc = 5;
inline constexpr int kSigLonAcc = 6;
// Categorical-signal indices into Sample::cat.
inline constexpr int kSigLaneChange = 0;
inline constexpr int kSigLeftInd = 1;
inline constexpr int kSigRightInd = 2;

struct Sample {
  double t = 0.0;  // seconds; trigger-relative once a trace has been cropped
  std::array<double, kNumContinuous> cont{};
  std::array<int, kNumCategorical> cat{};

  bool operator==(const Sample&) const = default;
};

enum class ManeuverLabel { NoOvertake = 0, Overtake = 1 };

inline int label_value(ManeuverLabel l) { return l == ManeuverLabel::Overtake ? 1 : 0; }

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A timestamped multichannel CAN recording at 10 Hz. Immutable by
/// convention after validate(); safe to share read-only across threads.
struct CanTrace {
  std::string truck_id;
  std::string file_id;
  std::optional<ManeuverLabel> label;
  std::vector<Sample> samples;

  /// Checks every invariant: nonempty, strictly increasing t on a 0.1 s
  /// grid, and all values inside their declared signal ranges.
  /// Throws TraceError naming the offending sample index.
  void validate() const;

  /// True when the trace is a logged segment: 651 samples over [-20, +45].
  bool is_logged_segment() const;

  bool operator==(const CanTrace&) const = default;
};

/// Range/grid check for a single sample; returns an error message or empty.
std::string check_sample(const Sample& s);

}  // namespace otd
