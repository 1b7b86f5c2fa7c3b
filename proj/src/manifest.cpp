#include "roofkit/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "roofkit/errors.hpp"

namespace roofkit {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open manifest: " + path.string());
  Manifest manifest;
  manifest.base_dir = path.has_parent_path() ? path.parent_path() : ".";

  std::string line;
  if (!std::getline(is, line)) throw IoError("manifest is empty: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  const std::vector<std::string> expected{"id", "gt", "footprint", "sidecar", "split"};
  if (header != expected)
    throw IoError("manifest header must be 'id,gt,footprint,sidecar,split': " + path.string());

  std::set<std::string> seen;
  size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 5)
      throw IoError("manifest line " + std::to_string(line_no) + " has " +
                    std::to_string(fields.size()) + " fields, expected 5");
    if (!seen.insert(fields[0]).second)
      throw IoError("manifest has duplicate id '" + fields[0] + "'");
    manifest.entries.push_back({fields[0], fields[1], fields[2], fields[3], fields[4]});
  }
  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.id < b.id; });
  return manifest;
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os << "id,gt,footprint,sidecar,split\n";
  for (const auto& e : entries)
    os << e.id << "," << e.gt_path << "," << e.footprint_path << "," << e.sidecar_path << ","
       << e.split << "\n";
}

}  // namespace roofkit
