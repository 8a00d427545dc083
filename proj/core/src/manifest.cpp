#include "otd/manifest.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace otd {

using nlohmann::json;

std::map<std::string, ClassCounts> DatasetManifest::counts_per_truck() const {
  std::map<std::string, ClassCounts> counts;
  for (const auto& e : entries) {
    auto& c = counts[e.truck];
    (e.label == ManeuverLabel::Overtake ? c.class1 : c.class0) += 1;
  }
  return counts;
}

ClassCounts DatasetManifest::total_counts() const {
  ClassCounts total;
  for (const auto& e : entries)
    (e.label == ManeuverLabel::Overtake ? total.class1 : total.class0) += 1;
  return total;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": invalid JSON: " + e.what());
  }
  if (!j.contains("entries") || !j["entries"].is_array())
    throw IoError(path.string() + ": missing 'entries' array");

  DatasetManifest m;
  m.base_dir = path.parent_path();
  std::set<std::string> seen;
  for (const auto& je : j["entries"]) {
    ManifestEntry e;
    e.path = je.at("path").get<std::string>();
    e.truck = je.at("truck").get<std::string>();
    if (e.truck.empty()) throw IoError(path.string() + ": empty truck id for " + e.path);
    if (!je.at("label").is_number_integer())
      throw IoError(path.string() + ": label for " + e.path + " must be 0 or 1");
    const int lv = je.at("label").get<int>();
    if (lv != 0 && lv != 1)
      throw IoError(path.string() + ": unknown label " + std::to_string(lv) + " for " + e.path);
    e.label = lv == 1 ? ManeuverLabel::Overtake : ManeuverLabel::NoOvertake;
    e.condition = je.value("condition", "");
    if (!seen.insert(e.path).second)
      throw IoError(path.string() + ": duplicate path " + e.path);
    if (!std::filesystem::exists(m.resolve(e)))
      throw IoError(path.string() + ": referenced file missing: " + m.resolve(e).string());
    m.entries.push_back(std::move(e));
  }
  return m;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  json j;
  j["entries"] = json::array();
  for (const auto& e : manifest.entries) {
    json je;
    je["path"] = e.path;
    je["truck"] = e.truck;
    je["label"] = label_value(e.label);
    if (!e.condition.empty()) je["condition"] = e.condition;
    j["entries"].push_back(std::move(je));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest: " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace otd
