#include "roofkit/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "roofkit/errors.hpp"

namespace roofkit {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Scalar TOML values map directly onto JSON scalars.
nlohmann::json parse_toml_scalar(const std::string& raw, int line_no) {
  const std::string v = trim(raw);
  if (v.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"')
      throw ConfigError("config line " + std::to_string(line_no) + ": unterminated string");
    return v.substr(1, v.size() - 2);
  }
  if (v == "true") return true;
  if (v == "false") return false;
  try {
    size_t used = 0;
    if (v.find_first_of(".eE") == std::string::npos) {
      const int64_t n = std::stoll(v, &used);
      if (used == v.size()) return n;
    }
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError("config line " + std::to_string(line_no) + ": bad value '" + v + "'");
}

nlohmann::json parse_toml_value(const std::string& raw, int line_no) {
  const std::string v = trim(raw);
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']')
      throw ConfigError("config line " + std::to_string(line_no) + ": unterminated array");
    auto arr = nlohmann::json::array();
    std::stringstream ss(v.substr(1, v.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (trim(item).empty()) continue;
      arr.push_back(parse_toml_scalar(item, line_no));
    }
    return arr;
  }
  return parse_toml_scalar(v, line_no);
}

std::map<std::string, nlohmann::json> parse_toml(std::istream& is) {
  std::map<std::string, nlohmann::json> values;
  std::string line, section;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    // strip comments outside strings
    bool in_string = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (line[i] == '#' && !in_string) {
        line.resize(i);
        break;
      }
    }
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) + ": bad section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    values[full] = parse_toml_value(t.substr(eq + 1), line_no);
  }
  return values;
}

void flatten_json(const nlohmann::json& j, const std::string& prefix,
                  std::map<std::string, nlohmann::json>& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      flatten_json(value, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else {
    out[prefix] = j;
  }
}

}  // namespace

Config Config::from_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config: " + path.string());
  std::stringstream buffer;
  buffer << is.rdbuf();
  const std::string text = buffer.str();

  Config config;
  const bool prefer_json = path.extension() == ".json";
  if (!prefer_json) {
    try {
      std::istringstream ss(text);
      config.values_ = parse_toml(ss);
      return config;
    } catch (const ConfigError&) {
      // fall through to JSON
    }
  }
  try {
    flatten_json(nlohmann::json::parse(text), "", config.values_);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + " is neither parseable TOML nor JSON: " +
                      e.what());
  }
  return config;
}

std::optional<double> Config::number(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  if (!it->second.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return it->second.get<double>();
}

std::optional<int64_t> Config::integer(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  if (!it->second.is_number_integer())
    throw ConfigError("config key '" + key + "' must be an integer");
  return it->second.get<int64_t>();
}

std::optional<bool> Config::boolean(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  if (!it->second.is_boolean()) throw ConfigError("config key '" + key + "' must be a boolean");
  return it->second.get<bool>();
}

std::optional<std::string> Config::str(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  if (!it->second.is_string()) throw ConfigError("config key '" + key + "' must be a string");
  return it->second.get<std::string>();
}

void apply_corruption_config(const Config& config, CorruptionSpec& spec) {
  auto num = [&](const char* name) -> std::optional<double> {
    if (auto v = config.number(std::string("corruption.") + name)) return v;
    return config.number(name);
  };
  auto integer = [&](const char* name) -> std::optional<int64_t> {
    if (auto v = config.integer(std::string("corruption.") + name)) return v;
    return config.integer(name);
  };

  if (auto v = num("sparsity_pct")) spec.sparsity_pct = *v;
  if (auto v = num("incompleteness_pct")) spec.incompleteness_pct = *v;
  if (auto v = integer("gmm_count")) spec.gmm_count = static_cast<int>(*v);
  if (auto v = num("sigma_min")) spec.sigma_min = *v;
  if (auto v = num("sigma_max")) spec.sigma_max = *v;
  if (auto v = integer("tree_count_min")) spec.tree_count_min = static_cast<int>(*v);
  if (auto v = integer("tree_count_max")) spec.tree_count_max = static_cast<int>(*v);
  if (auto v = num("tree_xy_min")) spec.tree_xy_min = *v;
  if (auto v = num("tree_xy_max")) spec.tree_xy_max = *v;
  if (auto v = num("tree_z_min")) spec.tree_z_min = *v;
  if (auto v = num("tree_z_max")) spec.tree_z_max = *v;
  if (auto v = num("tree_probability")) spec.tree_probability = *v;
  if (auto v = num("global_sigma_max")) spec.global_sigma_max = *v;
  if (auto v = num("outlier_prob")) spec.outlier_prob = *v;
  if (auto v = integer("seed")) spec.seed = static_cast<uint64_t>(*v);

  // Catch typos under the corruption section.
  static const char* known[] = {
      "sparsity_pct", "incompleteness_pct", "gmm_count",  "sigma_min",      "sigma_max",
      "tree_count_min", "tree_count_max",   "tree_xy_min", "tree_xy_max",   "tree_z_min",
      "tree_z_max",   "tree_probability",   "global_sigma_max", "outlier_prob", "seed"};
  for (const auto& [key, value] : config.values()) {
    if (key.rfind("corruption.", 0) != 0) continue;
    const std::string name = key.substr(11);
    bool ok = false;
    for (const char* k : known)
      if (name == k) ok = true;
    if (!ok) throw ConfigError("unknown corruption config key: " + key);
  }
  spec.validate();
}

}  // namespace roofkit
