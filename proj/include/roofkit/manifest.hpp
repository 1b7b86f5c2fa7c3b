#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace roofkit {

struct ManifestEntry {
  std::string id;
  std::string gt_path;
  std::string footprint_path;
  std::string sidecar_path;
  std::string split;
};

// Dataset index, one row per sample. Paths are stored relative to the
// manifest file; resolve() maps them onto the filesystem.
struct Manifest {
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& rel) const { return base_dir / rel; }
};

// CSV with header "id,gt,footprint,sidecar,split". Entries come back sorted
// by id; duplicate ids and missing columns are errors.
Manifest load_manifest(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries);

}  // namespace roofkit
