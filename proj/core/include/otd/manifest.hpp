#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "otd/trace.hpp"
#include "otd/trace_io.hpp"

namespace otd {

/// Bookkeeping for a dataset on disk: one entry per trace file with its
/// truck, label, and an optional acquisition-condition tag.
struct ManifestEntry {
  std::string path;  // relative to the manifest's directory, or absolute
  std::string truck;
  ManeuverLabel label = ManeuverLabel::NoOvertake;
  std::string condition;  // e.g. "mirror-like", "cms-like"; may be empty

  bool operator==(const ManifestEntry&) const = default;
};

struct ClassCounts {
  std::size_t class0 = 0;
  std::size_t class1 = 0;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;  // directory paths are resolved against

  std::filesystem::path resolve(const ManifestEntry& e) const {
    std::filesystem::path p(e.path);
    return p.is_absolute() ? p : base_dir / p;
  }

  /// Per-truck per-class file counts (pure function of entries).
  std::map<std::string, ClassCounts> counts_per_truck() const;

  ClassCounts total_counts() const;
};

/// Parses and validates a manifest JSON. Errors: duplicate path, unknown
/// label token, referenced file missing on disk.
DatasetManifest load_manifest(const std::filesystem::path& path);

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

}  // namespace otd
