#include "otd/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include <json.hpp>

#include "otd/rng.hpp"
#include "otd/trace_io.hpp"
#include "otd/trigger.hpp"

namespace otd {
namespace {

using nlohmann::json;

double gauss_bump(double x, double center, double width) {
  const double z = (x - center) / width;
  return std::exp(-0.5 * z * z);
}

double clamp_signal(double v, int cont_index) {
  const auto& d = kSignalCatalog[static_cast<std::size_t>(cont_index)];
  return std::clamp(v, d.min, d.max);
}

double smoothstep(double x) {
  const double t = std::clamp(x, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

/// Time-dependent signal shapes for one file; the lambdas capture the
/// per-file parameter draws by value. Times are warped trigger-relative
/// seconds (tw), except the activations which stay anchored at tw=0 so the
/// trigger instant is exact.
struct ShapeSet {
  std::function<double(double)> pedal;
  std::function<double(double)> speed;
  std::function<bool(double)> no_vehicle;     // distance/speed-ahead saturation
  std::function<double(double)> dist;         // only valid while a vehicle is ahead
  std::function<double(double)> speed_ahead;  // idem
  std::function<double(double)> rel;
  std::function<double(double)> lat;
  std::function<double(double)> lon;
  double lane_end = 2.0;                       // lane_change active on [0, lane_end]
  double left_ind_begin = 1.0, left_ind_end = 0.0;   // inactive when begin > end
  double right_ind_begin = 1.0, right_ind_end = 0.0;
};

ShapeSet make_overtake(Rng& rng, const ConditionProfile& prof) {
  ShapeSet s;
  const double ego = std::clamp(rng.normal(prof.base_speed_kmh + 3.0, 2.5), 70.0, 105.0);
  const double d0 = rng.uniform(100.0, 140.0);
  const double d_trig = rng.uniform(22.0, 48.0);
  const double jump_at = rng.uniform(0.3, 1.8);
  const double p_base = rng.uniform(30.0, 50.0);
  const double p_peak = rng.uniform(88.0, 98.0);
  const double p_release = rng.uniform(5.0, 15.0);
  const double rel_depth = rng.uniform(2.0, 4.5);
  const double rel_return = rng.uniform(1.5, 3.0);
  const double lat_spike = rng.uniform(1.0, 2.2);
  const double lat_return = rng.uniform(0.8, 1.6);
  const double ahead_gap = rng.uniform(3.0, 10.0);
  const bool redetect = rng.bernoulli(0.3);
  const double redetect_at = rng.uniform(6.0, 15.0);
  const double redetect_dist = rng.uniform(100.0, 200.0);
  const double lon_blip = rng.bernoulli(0.4) ? rng.uniform(0.1, 0.4) : 0.0;

  s.speed = [=](double) { return ego; };
  s.pedal = [=](double tw) {
    double p = p_base + (p_peak - p_base) * smoothstep((tw + 8.0) / 8.0);
    if (tw > 0.0) p -= p_release * (1.0 - std::exp(-tw / 5.0));
    return p;
  };
  s.no_vehicle = [=](double tw) {
    if (tw < jump_at) return false;
    return !(redetect && tw > redetect_at);
  };
  s.dist = [=](double tw) {
    if (redetect && tw > redetect_at) return redetect_dist;
    return d_trig + (d0 - d_trig) * std::clamp(-tw / 20.0, 0.0, 1.0);
  };
  s.speed_ahead = [=](double tw) {
    if (redetect && tw > redetect_at) return ego;  // new lead matches ego speed
    return ego - ahead_gap;
  };
  s.rel = [=](double tw) {
    return -rel_depth * gauss_bump(tw, 0.0, 1.2) + rel_return * gauss_bump(tw, 2.5, 1.5);
  };
  s.lat = [=](double tw) {
    return lat_spike * gauss_bump(tw, -0.2, 1.0) - lat_return * gauss_bump(tw, 2.5, 1.5);
  };
  s.lon = [=](double tw) { return lon_blip * gauss_bump(tw, 0.0, 2.0); };
  s.lane_end = rng.uniform(2.0, 4.0);
  if (rng.bernoulli(0.7)) {
    s.left_ind_begin = -rng.uniform(1.0, 3.0);
    s.left_ind_end = rng.uniform(1.0, 3.0);
  }
  if (rng.bernoulli(0.3)) {
    s.right_ind_begin = 12.0;
    s.right_ind_end = 16.0;
  }
  return s;
}

ShapeSet make_cruise_follow(Rng& rng, const ConditionProfile& prof) {
  ShapeSet s;
  const bool heavy = prof.traffic_density == TrafficDensity::Heavy;
  const bool cruise = rng.bernoulli(prof.cruise_control_prob);
  const double ego = std::clamp(rng.normal(prof.base_speed_kmh, 3.0), 60.0, 100.0);
  const double d_base = heavy ? rng.uniform(35.0, 80.0) : rng.uniform(95.0, 130.0);
  const double d_amp = heavy ? rng.uniform(3.0, 8.0) : rng.uniform(5.0, 12.0);
  const double d_period = rng.uniform(18.0, 35.0);
  const double d_phase = rng.uniform(0.0, 6.28);
  // The manual-driving pedal range already carries the density difference, so
  // the profile bias is not added again here.
  const double pedal_manual =
      heavy ? rng.uniform(50.0, 72.0) : rng.uniform(15.0, 35.0);
  // Sparse pedal blips under cruise control keep the per-trace median at 0.
  const double blip_at = rng.uniform(-15.0, 25.0);
  const double blip_len = rng.uniform(1.0, 3.0);
  const double blip_val = rng.uniform(10.0, 30.0);
  const double rel_mag = rng.uniform(0.4, 1.2);
  const double rel_sign = rng.bernoulli(heavy ? 0.5 : 0.95) ? 1.0 : -1.0;
  const double lat_amp = heavy ? rng.uniform(0.5, 1.3) : rng.uniform(0.4, 1.0);
  const double lon_base = heavy ? 0.10 : 0.15;

  s.speed = [=](double tw) { return ego + 0.05 * tw; };  // slight drift upward
  s.pedal = [=](double tw) {
    if (!cruise) return pedal_manual + 3.0 * std::sin(tw / 7.0);
    return (tw >= blip_at && tw <= blip_at + blip_len) ? blip_val : 0.0;
  };
  s.no_vehicle = [=](double) { return false; };
  s.dist = [=](double tw) { return d_base + d_amp * std::sin(6.28 * tw / d_period + d_phase); };
  s.speed_ahead = [=](double tw) { return ego + 0.05 * tw + 1.0; };
  s.rel = [=](double tw) { return rel_sign * rel_mag * gauss_bump(tw, 0.0, 1.0); };
  s.lat = [=](double tw) { return lat_amp * gauss_bump(tw, 0.0, 1.2); };
  s.lon = [=](double) { return lon_base; };
  s.lane_end = rng.uniform(1.0, 2.5);
  if (rng.bernoulli(0.2)) {
    s.left_ind_begin = -0.5;
    s.left_ind_end = rng.uniform(0.5, 1.5);
  }
  return s;
}

ShapeSet make_left_turn(Rng& rng, const ConditionProfile& prof) {
  ShapeSet s;
  const double ego0 = std::clamp(rng.normal(prof.base_speed_kmh - 10.0, 3.0), 60.0, 95.0);
  const double ego_trig = rng.uniform(55.0, 62.0);
  const double d_base = rng.uniform(60.0, 120.0);
  const double pedal0 = rng.uniform(5.0, 20.0) + prof.pedal_bias_pct * 0.5;
  const double pedal_after = rng.uniform(40.0, 70.0);
  const double rel_depth = rng.uniform(0.5, 2.0);
  const double lat_amp = rng.uniform(1.0, 2.5);

  s.speed = [=](double tw) {
    const double decel = ego0 + (ego_trig - ego0) * smoothstep((tw + 12.0) / 12.0);
    if (tw <= 2.0) return decel;
    return std::min(ego0, ego_trig + (tw - 2.0) * 1.5);  // accelerate out of the turn
  };
  s.pedal = [=](double tw) {
    return tw < 2.0 ? pedal0 : std::min(pedal_after, pedal0 + (tw - 2.0) * 10.0);
  };
  s.no_vehicle = [=](double) { return false; };
  s.dist = [=](double tw) { return d_base - 0.5 * tw; };
  s.speed_ahead = [=](double tw) { return std::max(30.0, ego0 - 5.0 - 0.2 * tw); };
  s.rel = [=](double tw) { return -rel_depth * gauss_bump(tw, 0.5, 2.0); };
  s.lat = [=](double tw) { return lat_amp * gauss_bump(tw, 1.5, 2.5); };
  s.lon = [=](double tw) { return tw > 2.0 ? 0.3 : -0.2; };
  s.lane_end = rng.uniform(1.0, 2.0);
  s.left_ind_begin = -rng.uniform(3.0, 6.0);
  s.left_ind_end = rng.uniform(3.0, 6.0);
  return s;
}

ShapeSet make_exit_lane(Rng& rng, const ConditionProfile& prof) {
  ShapeSet s;
  const double ego = std::clamp(rng.normal(prof.base_speed_kmh - 6.0, 3.0), 60.0, 95.0);
  const double d_base = rng.uniform(120.0, 190.0);
  const bool clears = rng.bernoulli(0.6);
  const double clear_at = rng.uniform(1.0, 3.0);
  const double pedal_base =
      std::clamp(rng.uniform(15.0, 40.0) + prof.pedal_bias_pct, 0.0, 90.0);
  const double rel_depth = rng.uniform(0.3, 1.5);
  const double lat_amp = rng.uniform(0.8, 1.5);

  s.speed = [=](double) { return ego; };
  s.pedal = [=](double tw) { return pedal_base + 2.0 * std::sin(tw / 5.0); };
  s.no_vehicle = [=](double tw) { return clears && tw > clear_at; };
  s.dist = [=](double) { return d_base; };
  s.speed_ahead = [=](double) { return ego - 2.0; };
  s.rel = [=](double tw) { return -rel_depth * gauss_bump(tw, 0.0, 1.0); };
  s.lat = [=](double tw) {
    return lat_amp * gauss_bump(tw, 0.0, 1.2) - 0.5 * gauss_bump(tw, 2.5, 1.5);
  };
  s.lon = [=](double) { return 0.05; };
  s.lane_end = rng.uniform(2.0, 3.0);
  if (rng.bernoulli(0.5)) {
    s.left_ind_begin = -1.0;
    s.left_ind_end = 2.0;
  }
  return s;
}

ShapeSet make_give_way(Rng& rng, const ConditionProfile& prof) {
  ShapeSet s;
  const double ego = std::clamp(rng.normal(prof.base_speed_kmh - 3.0, 3.0), 60.0, 95.0);
  const double dip = rng.uniform(3.0, 10.0);
  const double d0 = rng.uniform(130.0, 180.0);
  const double d_trig = rng.uniform(60.0, 110.0);
  const double pedal_base =
      std::clamp(rng.uniform(20.0, 45.0) + prof.pedal_bias_pct, 0.0, 90.0);
  const double rel_mag = rng.uniform(0.2, 0.8);
  const double lat_amp = rng.uniform(0.2, 0.6);

  s.speed = [=](double tw) { return ego - dip * gauss_bump(tw, 2.0, 3.0); };
  s.pedal = [=](double tw) { return pedal_base * (1.0 - gauss_bump(tw, 1.5, 2.5)); };
  s.no_vehicle = [=](double) { return false; };
  s.dist = [=](double tw) {
    return d_trig + (d0 - d_trig) * std::clamp(-tw / 20.0, 0.0, 1.0);
  };
  s.speed_ahead = [=](double tw) { return ego - dip * gauss_bump(tw, 2.0, 3.0) - 3.0; };
  s.rel = [=](double tw) { return rel_mag * gauss_bump(tw, 0.0, 1.2) + 0.3; };
  s.lat = [=](double tw) { return lat_amp * gauss_bump(tw, 0.5, 2.0); };
  s.lon = [=](double tw) { return -0.3 * gauss_bump(tw, 1.0, 2.0) + 0.1; };
  s.lane_end = rng.uniform(1.0, 2.0);
  if (rng.bernoulli(0.4)) {
    s.right_ind_begin = 0.0;
    s.right_ind_end = 2.0;
  }
  return s;
}

ShapeSet make_pass_stationary(Rng& rng, const ConditionProfile& prof) {
  ShapeSet s;
  const double ego = rng.uniform(55.0, 70.0);
  const double d0 = rng.uniform(150.0, 200.0);
  const double d_trig = rng.uniform(30.0, 60.0);
  const double jump_at = rng.uniform(0.5, 2.0);
  const double obstacle_speed = rng.uniform(0.0, 8.0);
  const double pedal_base =
      std::clamp(rng.uniform(25.0, 50.0) + prof.pedal_bias_pct * 0.5, 0.0, 90.0);
  const double rel_depth = rng.uniform(0.5, 2.0);
  const double lat_amp = rng.uniform(0.8, 1.6);

  s.speed = [=](double) { return ego; };
  s.pedal = [=](double) { return pedal_base; };
  s.no_vehicle = [=](double tw) { return tw > jump_at; };
  s.dist = [=](double tw) {
    return d_trig + (d0 - d_trig) * std::clamp(-tw / 15.0, 0.0, 1.0);
  };
  s.speed_ahead = [=](double) { return obstacle_speed; };
  s.rel = [=](double tw) { return -rel_depth * gauss_bump(tw, 0.0, 1.2); };
  s.lat = [=](double tw) {
    return lat_amp * gauss_bump(tw, 0.0, 1.2) - 0.6 * gauss_bump(tw, 3.0, 1.5);
  };
  s.lon = [=](double) { return 0.0; };
  s.lane_end = rng.uniform(1.5, 3.0);
  return s;
}

ShapeSet make_shapes(ScenarioKind kind, Rng& rng, const ConditionProfile& prof) {
  switch (kind) {
    case ScenarioKind::Overtake: return make_overtake(rng, prof);
    case ScenarioKind::LeftTurnIntersection: return make_left_turn(rng, prof);
    case ScenarioKind::ExitLaneAvoid: return make_exit_lane(rng, prof);
    case ScenarioKind::GiveWayMerge: return make_give_way(rng, prof);
    case ScenarioKind::PassStationary: return make_pass_stationary(rng, prof);
    case ScenarioKind::CruiseFollow: return make_cruise_follow(rng, prof);
  }
  throw GeneratorError("unhandled scenario kind");
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Overtake: return "overtake";
    case ScenarioKind::LeftTurnIntersection: return "left_turn_intersection";
    case ScenarioKind::ExitLaneAvoid: return "exit_lane_avoid";
    case ScenarioKind::GiveWayMerge: return "give_way_merge";
    case ScenarioKind::PassStationary: return "pass_stationary";
    case ScenarioKind::CruiseFollow: return "cruise_follow";
  }
  return "unknown";
}

std::vector<std::string> scenario_kind_names() {
  return {"overtake",        "left_turn_intersection", "exit_lane_avoid",
          "give_way_merge",  "pass_stationary",        "cruise_follow"};
}

ScenarioKind scenario_kind_from_string(const std::string& name) {
  if (name == "overtake") return ScenarioKind::Overtake;
  if (name == "left_turn_intersection") return ScenarioKind::LeftTurnIntersection;
  if (name == "exit_lane_avoid") return ScenarioKind::ExitLaneAvoid;
  if (name == "give_way_merge") return ScenarioKind::GiveWayMerge;
  if (name == "pass_stationary") return ScenarioKind::PassStationary;
  if (name == "cruise_follow") return ScenarioKind::CruiseFollow;
  std::string valid;
  for (const auto& n : scenario_kind_names()) valid += " " + n;
  throw GeneratorError("unknown scenario kind '" + name + "'; valid kinds:" + valid);
}

ConditionProfile ConditionProfile::light() { return ConditionProfile{}; }

ConditionProfile ConditionProfile::heavy() {
  ConditionProfile p;
  p.cruise_control_prob = 0.1;
  p.traffic_density = TrafficDensity::Heavy;
  p.base_speed_kmh = 82.0;
  p.pedal_bias_pct = 30.0;
  return p;
}

ConditionProfile ConditionProfile::by_name(const std::string& name) {
  if (name == "light") return light();
  if (name == "heavy") return heavy();
  throw GeneratorError("unknown condition profile '" + name + "' (light or heavy)");
}

void ConditionProfile::validate() const {
  if (cruise_control_prob < 0.0 || cruise_control_prob > 1.0)
    throw GeneratorError("cruise_control_prob must be in [0,1]");
  for (double s : noise_sigma)
    if (s < 0.0) throw GeneratorError("noise sigmas must be nonnegative");
}

void ScenarioSpec::validate() const {
  profile.validate();
  if (duration_s < 65.0)
    throw GeneratorError("duration must be at least 65 s to fit the logging window");
  if (trigger_time_s < kLogPreTriggerS ||
      trigger_time_s > duration_s - kLogPostTriggerS)
    throw GeneratorError("trigger time must lie within [20, duration-45]");
  const double grid = trigger_time_s / kSamplePeriodS;
  if (std::abs(grid - std::round(grid)) > 1e-6)
    throw GeneratorError("trigger time must be on the 0.1 s sample grid");
}

CanTrace generate_trace(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const double warp = rng.uniform(0.8, 1.2);  // per-file time warp
  ShapeSet shapes = make_shapes(spec.kind, rng, spec.profile);

  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * 10.0)) + 1;
  const auto trig_idx = static_cast<std::size_t>(std::llround(spec.trigger_time_s * 10.0));

  CanTrace trace;
  trace.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * kSamplePeriodS;
    const double tau = t - spec.trigger_time_s;
    const double tw = tau / warp;

    Sample s;
    s.t = t;
    const auto& sigma = spec.profile.noise_sigma;
    const double pedal_cmd = shapes.pedal(tw);
    if (pedal_cmd <= 0.0) {
      s.cont[kSigAccelPedal] = 0.0;  // unpressed pedal reads exactly 0%
      rng.normal(0.0, 1.0);          // keep the draw sequence aligned
    } else {
      s.cont[kSigAccelPedal] = clamp_signal(
          pedal_cmd + rng.normal(0.0, sigma[kSigAccelPedal]), kSigAccelPedal);
    }
    if (shapes.no_vehicle(tw)) {
      s.cont[kSigDistAhead] = kNoVehicleAhead;   // saturation: no noise on 255
      s.cont[kSigSpeedAhead] = kNoVehicleAhead;
      rng.normal(0.0, 1.0);  // keep the draw sequence aligned across branches
      rng.normal(0.0, 1.0);
    } else {
      s.cont[kSigDistAhead] = std::clamp(
          shapes.dist(tw) + rng.normal(0.0, sigma[kSigDistAhead]), 0.0, 254.0);
      s.cont[kSigSpeedAhead] = std::clamp(
          shapes.speed_ahead(tw) + rng.normal(0.0, sigma[kSigSpeedAhead]), 0.0, 254.0);
    }
    s.cont[kSigRelSpeed] =
        clamp_signal(shapes.rel(tw) + rng.normal(0.0, sigma[kSigRelSpeed]), kSigRelSpeed);
    s.cont[kSigSpeed] =
        clamp_signal(shapes.speed(tw) + rng.normal(0.0, sigma[kSigSpeed]), kSigSpeed);
    s.cont[kSigLatAcc] =
        clamp_signal(shapes.lat(tw) + rng.normal(0.0, sigma[kSigLatAcc]), kSigLatAcc);
    s.cont[kSigLonAcc] =
        clamp_signal(shapes.lon(tw) + rng.normal(0.0, sigma[kSigLonAcc]), kSigLonAcc);

    s.cat[kSigLaneChange] = (tau >= -1e-9 && tau <= shapes.lane_end) ? 1 : 0;
    s.cat[kSigLeftInd] =
        (tau >= shapes.left_ind_begin && tau <= shapes.left_ind_end) ? 1 : 0;
    s.cat[kSigRightInd] =
        (tau >= shapes.right_ind_begin && tau <= shapes.right_ind_end) ? 1 : 0;

    trace.samples.push_back(s);
  }

  // The trigger instant is guaranteed by construction: nudge the trigger
  // sample back inside the thresholds if noise pushed it across.
  Sample& ts = trace.samples[trig_idx];
  ts.cat[kSigLaneChange] = 1;
  if (ts.cont[kSigSpeed] <= 51.0) ts.cont[kSigSpeed] = 51.0;
  if (ts.cont[kSigDistAhead] >= 199.0) ts.cont[kSigDistAhead] = 199.0;
  if (std::abs(ts.cont[kSigRelSpeed]) <= 0.15)
    ts.cont[kSigRelSpeed] = ts.cont[kSigRelSpeed] < 0.0 ? -0.3 : 0.3;

  trace.validate();
  return trace;
}

GeneratorConfig GeneratorConfig::demo(const std::filesystem::path& out_dir,
                                      std::uint64_t master_seed) {
  GeneratorConfig cfg;
  cfg.out_dir = out_dir;
  cfg.master_seed = master_seed;

  struct TruckPlan {
    const char* truck;
    const char* condition;
    std::size_t overtakes;
    std::size_t cruise;
    std::size_t per_distractor;
  };
  // 200 overtake + 200 no-overtake files across five trucks; t1-t3 run the
  // light profile, t4-t5 the heavy one.
  const TruckPlan plans[] = {
      {"t1", "light", 80, 30, 5}, {"t2", "light", 40, 36, 6}, {"t3", "light", 10, 6, 1},
      {"t4", "heavy", 55, 42, 7}, {"t5", "heavy", 15, 6, 1},
  };
  const ScenarioKind distractors[] = {
      ScenarioKind::LeftTurnIntersection, ScenarioKind::ExitLaneAvoid,
      ScenarioKind::GiveWayMerge, ScenarioKind::PassStationary};

  for (const auto& p : plans) {
    cfg.groups.push_back({p.truck, p.condition, ScenarioKind::Overtake, p.overtakes});
    cfg.groups.push_back({p.truck, p.condition, ScenarioKind::CruiseFollow, p.cruise});
    for (ScenarioKind k : distractors)
      cfg.groups.push_back({p.truck, p.condition, k, p.per_distractor});
  }
  return cfg;
}

GeneratorConfig GeneratorConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw GeneratorError("cannot open generator config: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw GeneratorError(path.string() + ": invalid JSON: " + e.what());
  }
  GeneratorConfig cfg;
  cfg.master_seed = j.value("master_seed", std::uint64_t{0});
  cfg.out_dir = j.value("out_dir", std::string{});
  for (const auto& jg : j.at("groups")) {
    GeneratorConfig::Group g;
    g.truck = jg.at("truck").get<std::string>();
    g.condition = jg.at("condition").get<std::string>();
    g.kind = scenario_kind_from_string(jg.at("kind").get<std::string>());
    g.count = jg.at("count").get<std::size_t>();
    ConditionProfile::by_name(g.condition);  // validate early
    cfg.groups.push_back(std::move(g));
  }
  return cfg;
}

DatasetManifest generate_dataset(const GeneratorConfig& config) {
  if (config.out_dir.empty()) throw GeneratorError("output directory not set");
  std::filesystem::create_directories(config.out_dir);

  DatasetManifest manifest;
  manifest.base_dir = config.out_dir;

  std::map<std::string, std::size_t> per_truck_index;
  for (const auto& group : config.groups) {
    const ConditionProfile profile = ConditionProfile::by_name(group.condition);
    for (std::size_t i = 0; i < group.count; ++i) {
      const std::size_t idx = per_truck_index[group.truck]++;
      const std::uint64_t seed =
          derive_seed(config.master_seed, "file:" + group.truck, idx);

      ScenarioSpec spec;
      spec.kind = group.kind;
      spec.profile = profile;
      spec.duration_s = 80.0;
      Rng trig_rng(derive_seed(seed, "trigger-placement"));
      spec.trigger_time_s =
          std::round(trig_rng.uniform(20.5, 34.9) * 10.0) / 10.0;
      spec.seed = seed;

      CanTrace raw = generate_trace(spec);
      const auto triggers = scan(raw);
      if (triggers.empty() ||
          std::abs(triggers.front() - spec.trigger_time_s) > kTimeTolerance)
        throw GeneratorError("generated trace failed its own trigger guarantee (" +
                             to_string(group.kind) + ", truck " + group.truck + ")");

      LoggedSegment segment = crop_log(raw, spec.trigger_time_s);
      char name[64];
      std::snprintf(name, sizeof(name), "%s_%04zu_%s.csv", group.truck.c_str(), idx,
                    to_string(group.kind).c_str());
      segment.trace.truck_id = group.truck;
      segment.trace.file_id = std::filesystem::path(name).stem().string();
      segment.trace.label =
          is_overtake(group.kind) ? ManeuverLabel::Overtake : ManeuverLabel::NoOvertake;
      save_trace(segment.trace, config.out_dir / name);

      ManifestEntry entry;
      entry.path = name;
      entry.truck = group.truck;
      entry.label = *segment.trace.label;
      entry.condition = group.condition + std::string("-like");
      manifest.entries.push_back(std::move(entry));
    }
  }
  save_manifest(manifest, config.out_dir / "manifest.json");
  return manifest;
}

}  // namespace otd
