#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "roofkit/corruption.hpp"

namespace roofkit {

// Flat key/value view of a run configuration. Sections and nested objects
// flatten to dotted keys ("corruption.sparsity_pct"). Files may be TOML
// (a pragmatic subset: sections, scalars, flat arrays, comments) or JSON;
// the extension decides, with JSON as the fallback parser.
class Config {
 public:
  Config() = default;
  static Config from_file(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::optional<double> number(const std::string& key) const;
  std::optional<int64_t> integer(const std::string& key) const;
  std::optional<bool> boolean(const std::string& key) const;
  std::optional<std::string> str(const std::string& key) const;

  const std::map<std::string, nlohmann::json>& values() const { return values_; }

 private:
  std::map<std::string, nlohmann::json> values_;
};

// Applies the recognized corruption keys, accepting both bare names and
// the "corruption." prefix. Unknown keys under "corruption." are errors.
void apply_corruption_config(const Config& config, CorruptionSpec& spec);

}  // namespace roofkit
