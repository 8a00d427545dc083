#include <doctest.h>

#include <algorithm>
#include <fstream>

#include "otd/harness.hpp"
#include "otd/synthgen.hpp"
#include "otd/trace_io.hpp"
#include "otd/trigger.hpp"
#include "test_util.hpp"

using namespace otd;
using otd_test::TempDir;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ScenarioSpec spec_for(ScenarioKind kind, const ConditionProfile& profile,
                      std::uint64_t seed) {
  ScenarioSpec spec;
  spec.kind = kind;
  spec.profile = profile;
  spec.seed = seed;
  return spec;
}

const ScenarioKind kAllKinds[] = {
    ScenarioKind::Overtake,        ScenarioKind::LeftTurnIntersection,
    ScenarioKind::ExitLaneAvoid,   ScenarioKind::GiveWayMerge,
    ScenarioKind::PassStationary,  ScenarioKind::CruiseFollow,
};

}  // namespace

TEST_CASE("scenario kind names round trip") {
  for (ScenarioKind kind : kAllKinds)
    CHECK(scenario_kind_from_string(to_string(kind)) == kind);
  CHECK(scenario_kind_names().size() == 6);
  CHECK_THROWS_AS(scenario_kind_from_string("u_turn"), GeneratorError);
  CHECK(is_overtake(ScenarioKind::Overtake));
  CHECK_FALSE(is_overtake(ScenarioKind::CruiseFollow));
}

TEST_CASE("spec validation") {
  ScenarioSpec spec;
  CHECK_NOTHROW(spec.validate());
  SUBCASE("too short") {
    spec.duration_s = 60.0;
    CHECK_THROWS_AS(spec.validate(), GeneratorError);
  }
  SUBCASE("trigger too early") {
    spec.trigger_time_s = 19.0;
    CHECK_THROWS_AS(spec.validate(), GeneratorError);
  }
  SUBCASE("trigger leaves no post-window") {
    spec.trigger_time_s = 36.0;
    CHECK_THROWS_AS(spec.validate(), GeneratorError);
  }
  SUBCASE("off-grid trigger") {
    spec.trigger_time_s = 25.03;
    CHECK_THROWS_AS(spec.validate(), GeneratorError);
  }
  SUBCASE("bad profile") {
    spec.profile.cruise_control_prob = 1.5;
    CHECK_THROWS_AS(spec.validate(), GeneratorError);
  }
}

TEST_CASE("generation is deterministic and seed-sensitive") {
  const auto spec = spec_for(ScenarioKind::Overtake, ConditionProfile::light(), 77);
  const CanTrace a = generate_trace(spec);
  const CanTrace b = generate_trace(spec);
  CHECK(a == b);

  auto other = spec;
  other.seed = 78;
  CHECK_FALSE(a == generate_trace(other));
}

TEST_CASE("every scenario kind fires exactly at the requested trigger instant") {
  for (ScenarioKind kind : kAllKinds) {
    CAPTURE(to_string(kind));
    for (const auto& profile : {ConditionProfile::light(), ConditionProfile::heavy()}) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto spec = spec_for(kind, profile, seed);
        spec.trigger_time_s = 20.0 + static_cast<double>(seed % 3) * 5.0;
        const CanTrace trace = generate_trace(spec);
        CHECK_NOTHROW(trace.validate());
        CHECK(trace.samples.size() == 801);
        const auto triggers = scan(trace);
        REQUIRE_FALSE(triggers.empty());
        CHECK(triggers.front() == doctest::Approx(spec.trigger_time_s));
        CHECK_NOTHROW(crop_log(trace, spec.trigger_time_s));
      }
    }
  }
}

TEST_CASE("cruise-control driving keeps the pedal median at zero") {
  std::size_t zero_median_files = 0;
  const std::size_t files = 40;
  for (std::uint64_t seed = 100; seed < 100 + files; ++seed) {
    const CanTrace trace =
        generate_trace(spec_for(ScenarioKind::CruiseFollow, ConditionProfile::light(), seed));
    std::vector<double> pedal;
    for (const Sample& s : trace.samples) pedal.push_back(s.cont[kSigAccelPedal]);
    if (median(pedal) == 0.0) ++zero_median_files;
  }
  // The light profile drives on cruise control 90% of the time.
  CHECK(zero_median_files >= files * 7 / 10);
}

TEST_CASE("the heavy profile shifts following-traffic statistics") {
  std::vector<double> light_pedal, heavy_pedal, light_dist, heavy_dist;
  for (std::uint64_t seed = 200; seed < 240; ++seed) {
    const CanTrace light =
        generate_trace(spec_for(ScenarioKind::CruiseFollow, ConditionProfile::light(), seed));
    const CanTrace heavy =
        generate_trace(spec_for(ScenarioKind::CruiseFollow, ConditionProfile::heavy(), seed));
    for (const Sample& s : light.samples) {
      light_pedal.push_back(s.cont[kSigAccelPedal]);
      light_dist.push_back(s.cont[kSigDistAhead]);
    }
    for (const Sample& s : heavy.samples) {
      heavy_pedal.push_back(s.cont[kSigAccelPedal]);
      heavy_dist.push_back(s.cont[kSigDistAhead]);
    }
  }
  CHECK(median(heavy_pedal) > 50.0);  // mostly manual, high pedal
  CHECK(median(light_pedal) < 10.0);  // mostly cruise control
  CHECK(median(heavy_dist) < median(light_dist));  // denser traffic
}

TEST_CASE("condition profile factories") {
  CHECK(ConditionProfile::by_name("light").traffic_density == TrafficDensity::Light);
  CHECK(ConditionProfile::by_name("heavy").traffic_density == TrafficDensity::Heavy);
  CHECK_THROWS_AS(ConditionProfile::by_name("medium"), GeneratorError);
}

TEST_CASE("demo dataset layout") {
  const GeneratorConfig cfg = GeneratorConfig::demo("unused", 0);
  std::size_t total = 0, overtakes = 0;
  std::map<std::string, std::size_t> per_truck;
  for (const auto& g : cfg.groups) {
    total += g.count;
    per_truck[g.truck] += g.count;
    if (is_overtake(g.kind)) overtakes += g.count;
  }
  CHECK(total == 400);
  CHECK(overtakes == 200);
  CHECK(per_truck.size() == 5);
}

TEST_CASE("generate_dataset writes loadable segments and a manifest") {
  TempDir dir("gen_small");
  GeneratorConfig cfg;
  cfg.out_dir = dir.path() / "data";
  cfg.master_seed = 5;
  cfg.groups = {
      {"tA", "light", ScenarioKind::Overtake, 3},
      {"tA", "light", ScenarioKind::CruiseFollow, 3},
      {"tB", "heavy", ScenarioKind::PassStationary, 2},
  };
  const DatasetManifest manifest = generate_dataset(cfg);
  CHECK(manifest.entries.size() == 8);

  const DatasetManifest loaded = load_manifest(cfg.out_dir / "manifest.json");
  CHECK(loaded.entries == manifest.entries);
  const auto counts = loaded.counts_per_truck();
  CHECK(counts.at("tA").class1 == 3);
  CHECK(counts.at("tA").class0 == 3);
  CHECK(counts.at("tB").class0 == 2);

  for (const auto& entry : loaded.entries) {
    const CanTrace trace = load_trace(loaded.resolve(entry));
    CHECK(trace.is_logged_segment());
    REQUIRE(trace.label.has_value());
    CHECK(*trace.label == entry.label);
    CHECK(trace.truck_id == entry.truck);
  }

  SUBCASE("regeneration is byte-identical") {
    GeneratorConfig again = cfg;
    again.out_dir = dir.path() / "data2";
    generate_dataset(again);
    for (const auto& entry : manifest.entries) {
      CHECK(hash_file(cfg.out_dir / entry.path) == hash_file(again.out_dir / entry.path));
    }
  }
}

TEST_CASE("generator config from JSON") {
  TempDir dir("gen_cfg");
  const auto path = dir.path() / "cfg.json";
  std::ofstream(path) << R"({
    "master_seed": 11,
    "out_dir": "somewhere",
    "groups": [
      {"truck": "t1", "condition": "light", "kind": "overtake", "count": 4},
      {"truck": "t2", "condition": "heavy", "kind": "give_way_merge", "count": 2}
    ]
  })";
  const GeneratorConfig cfg = GeneratorConfig::from_json_file(path);
  CHECK(cfg.master_seed == 11);
  CHECK(cfg.groups.size() == 2);
  CHECK(cfg.groups[0].kind == ScenarioKind::Overtake);
  CHECK(cfg.groups[1].condition == "heavy");
  CHECK(cfg.groups[1].count == 2);

  std::ofstream(path) << R"({"groups": [{"truck": "t1"}]})";
  CHECK_THROWS(GeneratorConfig::from_json_file(path));
  CHECK_THROWS_AS(GeneratorConfig::from_json_file(dir.path() / "none.json"),
                  GeneratorError);
}
