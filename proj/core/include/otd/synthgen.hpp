#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "otd/manifest.hpp"
#include "otd/trace.hpp"

namespace otd {

/// Scenario families. Overtake is the positive class; the others are
/// distractor maneuvers that still fire the precondition trigger (turning
/// left at an intersection, leaving an exit-only lane, giving way to a
/// merging vehicle, surpassing a stopped vehicle, plain following).
enum class ScenarioKind {
  Overtake,
  LeftTurnIntersection,
  ExitLaneAvoid,
  GiveWayMerge,
  PassStationary,
  CruiseFollow,
};

inline bool is_overtake(ScenarioKind k) { return k == ScenarioKind::Overtake; }

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& name);
std::vector<std::string> scenario_kind_names();

enum class TrafficDensity { Light, Heavy };

/// Acquisition-condition knobs. The heavy profile emulates denser traffic:
/// little cruise-control usage, higher manual pedal positions, shorter
/// distances to the vehicle ahead. This is the lever for the
/// distribution-shift experiment.
struct ConditionProfile {
  double cruise_control_prob = 0.9;
  TrafficDensity traffic_density = TrafficDensity::Light;
  double base_speed_kmh = 85.0;
  double pedal_bias_pct = 0.0;
  std::array<double, kNumContinuous> noise_sigma{1.5, 2.0, 1.5, 0.08, 0.8, 0.06, 0.04};

  static ConditionProfile light();
  static ConditionProfile heavy();
  static ConditionProfile by_name(const std::string& name);  // "light" / "heavy"

  void validate() const;
};

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::Overtake;
  ConditionProfile profile{};
  double duration_s = 80.0;       // >= 65
  double trigger_time_s = 25.0;   // within [20, duration - 45]
  std::uint64_t seed = 0;

  void validate() const;
};

class GeneratorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic scenario synthesis: the same spec always yields the same
/// trace, bit for bit. Output is an unlabeled absolute-time trace whose
/// precondition trigger fires exactly at trigger_time_s.
CanTrace generate_trace(const ScenarioSpec& spec);

/// Dataset generation config: file counts per (truck, condition, kind).
struct GeneratorConfig {
  struct Group {
    std::string truck;
    std::string condition;  // "light" or "heavy"
    ScenarioKind kind = ScenarioKind::CruiseFollow;
    std::size_t count = 0;
  };

  std::vector<Group> groups;
  std::uint64_t master_seed = 0;
  std::filesystem::path out_dir;

  /// 400 files over five trucks and two condition profiles: three
  /// light-condition trucks and two heavy-condition trucks, 200 overtake +
  /// 200 no-overtake in total.
  static GeneratorConfig demo(const std::filesystem::path& out_dir,
                              std::uint64_t master_seed);

  static GeneratorConfig from_json_file(const std::filesystem::path& path);
};

/// Generates raw traces, runs the trigger scanner, crops the logged
/// [-20, +45] segment, and writes one trace CSV (+ sidecar) per file plus a
/// manifest.json. Per-file seeds derive from (master_seed, truck, kind,
/// index), so the file set is deterministic and order-independent.
DatasetManifest generate_dataset(const GeneratorConfig& config);

}  // namespace otd
