#include "roofkit/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "roofkit/errors.hpp"

namespace roofkit {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(std::string("CorruptionSpec: ") + what);
}

}  // namespace

void CorruptionSpec::validate() const {
  require(sparsity_pct >= 0.0 && sparsity_pct <= 100.0, "sparsity_pct outside [0, 100]");
  require(incompleteness_pct >= 0.0 && incompleteness_pct <= 100.0,
          "incompleteness_pct outside [0, 100]");
  require(gmm_count >= 1, "gmm_count must be >= 1");
  require(sigma_min >= 0.0 && sigma_min <= sigma_max, "sigma range must satisfy 0 <= min <= max");
  require(tree_count_min >= 0 && tree_count_min <= tree_count_max,
          "tree count range must satisfy 0 <= min <= max");
  require(tree_xy_min > 0.0 && tree_xy_min <= tree_xy_max, "tree_xy range must be ordered, > 0");
  require(tree_z_min > 0.0 && tree_z_min <= tree_z_max, "tree_z range must be ordered, > 0");
  require(tree_probability >= 0.0 && tree_probability <= 1.0, "tree_probability outside [0, 1]");
  require(global_sigma_max >= 0.0, "global_sigma_max must be >= 0");
  require(outlier_prob >= 0.0 && outlier_prob <= 1.0, "outlier_prob outside [0, 1]");
}

CorruptionSpec preset_spec(std::string_view name) {
  CorruptionSpec spec;
  bool have_s = false, have_i = false;
  size_t pos = 0;
  while (pos < name.size()) {
    while (pos < name.size() && (name[pos] == '_' || name[pos] == ' ')) ++pos;
    if (pos >= name.size()) break;
    const char key = name[pos++];
    size_t end = pos;
    while (end < name.size() && (std::isdigit(static_cast<unsigned char>(name[end])) ||
                                 name[end] == '.'))
      ++end;
    if (end == pos) throw ConfigError("bad preset name: " + std::string(name));
    const double value = std::stod(std::string(name.substr(pos, end - pos)));
    if (key == 's')
      spec.sparsity_pct = value, have_s = true;
    else if (key == 'i')
      spec.incompleteness_pct = value, have_i = true;
    else if (key == 't')
      spec.tree_count_min = spec.tree_count_max = static_cast<int>(value),
      spec.tree_probability = value > 0 ? 1.0 : 0.0;
    else
      throw ConfigError("bad preset name: " + std::string(name));
    pos = end;
  }
  if (!have_s && !have_i) throw ConfigError("preset carries no s/i field: " + std::string(name));
  spec.validate();
  return spec;
}

std::vector<GaussComponent> draw_gmm_components(int width, int height,
                                                const CorruptionSpec& spec, Rng& rng) {
  const double sigma_unit = std::max(width, height);
  std::vector<GaussComponent> components(spec.gmm_count);
  for (auto& g : components) {
    g.mu_x = rng.uniform(0.0, width);
    g.mu_y = rng.uniform(0.0, height);
    g.sigma_x = rng.uniform(spec.sigma_min, spec.sigma_max) * sigma_unit;
    g.sigma_y = rng.uniform(spec.sigma_min, spec.sigma_max) * sigma_unit;
  }
  return components;
}

double gauss_density(const GaussComponent& g, double x, double y) {
  double ex;
  if (g.sigma_x > 0.0) {
    const double dx = x - g.mu_x;
    ex = dx * dx / (2.0 * g.sigma_x * g.sigma_x);
  } else {
    if (std::lround(g.mu_x) != std::lround(x)) return 0.0;
    ex = 0.0;
  }
  double ey;
  if (g.sigma_y > 0.0) {
    const double dy = y - g.mu_y;
    ey = dy * dy / (2.0 * g.sigma_y * g.sigma_y);
  } else {
    if (std::lround(g.mu_y) != std::lround(y)) return 0.0;
    ey = 0.0;
  }
  return std::exp(-(ex + ey));
}

double gmm_density(std::span<const GaussComponent> components, double x, double y) {
  double sum = 0.0;
  for (const auto& g : components) sum += gauss_density(g, x, y);
  return sum / static_cast<double>(components.size());
}

HeightMap inject_sparsity(const HeightMap& z, const Footprint& m, double s_pct, Rng& rng) {
  if (s_pct < 0.0 || s_pct > 100.0) throw ConfigError("sparsity_pct outside [0, 100]");
  HeightMap out = z;
  std::vector<uint32_t> candidates;
  candidates.reserve(m.mask.size());
  for (uint32_t i = 0; i < m.mask.size(); ++i)
    if (m.mask[i]) candidates.push_back(i);
  const auto n_remove =
      static_cast<size_t>(std::llround(s_pct / 100.0 * static_cast<double>(candidates.size())));
  // Partial Fisher-Yates: the first n_remove slots become the removal set.
  auto vals = out.values();
  for (size_t k = 0; k < n_remove; ++k) {
    const auto j = static_cast<size_t>(
        rng.uniform_int(static_cast<int64_t>(k), static_cast<int64_t>(candidates.size()) - 1));
    std::swap(candidates[k], candidates[j]);
    vals[candidates[k]] = 0.0f;
  }
  return out;
}

Footprint incompleteness_mask_training(const Footprint& m,
                                       std::span<const GaussComponent> components,
                                       Rng& rng) {
  Footprint mask(m.width, m.height);
  for (const auto& g : components) {
    for (int y = 0; y < m.height; ++y) {
      for (int x = 0; x < m.width; ++x) {
        const double p = rng.uniform();
        if (gauss_density(g, x, y) > p) mask.at(x, y) = 1;
      }
    }
  }
  for (size_t i = 0; i < mask.mask.size(); ++i) mask.mask[i] &= m.mask[i];
  return mask;
}

Footprint incompleteness_mask_training(const Footprint& m, const CorruptionSpec& spec,
                                       Rng& rng) {
  const auto components = draw_gmm_components(m.width, m.height, spec, rng);
  return incompleteness_mask_training(m, components, rng);
}

Footprint incompleteness_mask_benchmark(const Footprint& m, double i_pct,
                                        const CorruptionSpec& spec, Rng& rng) {
  const int fp_count = m.popcount();
  const auto n_thres = static_cast<int64_t>(std::llround(i_pct / 100.0 * fp_count));
  if (n_thres > fp_count)
    throw InfeasibleMask("incompleteness target exceeds footprint size");
  Footprint mask(m.width, m.height);
  if (n_thres == 0) return mask;

  auto components = draw_gmm_components(m.width, m.height, spec, rng);
  const int64_t budget = 10000 * n_thres;
  // Draws since the last newly marked pixel; a long drought means the mixture
  // mass barely intersects the footprint, so the means are redrawn.
  const int64_t drought_limit = std::max<int64_t>(2000, 4 * fp_count);
  int64_t draws = 0;
  int64_t drought = 0;
  int64_t marked = 0;
  while (marked < n_thres) {
    if (draws >= budget)
      throw MaskSamplingStalled("benchmark mask sampling exhausted its draw budget");
    if (drought >= drought_limit) {
      for (auto& g : components) {
        g.mu_x = rng.uniform(0.0, m.width);
        g.mu_y = rng.uniform(0.0, m.height);
      }
      drought = 0;
    }
    ++draws;
    ++drought;
    const auto& g = components[static_cast<size_t>(
        rng.uniform_int(0, static_cast<int64_t>(components.size()) - 1))];
    const double fx = g.mu_x + rng.normal() * g.sigma_x;
    const double fy = g.mu_y + rng.normal() * g.sigma_y;
    const auto x = static_cast<int>(std::lround(fx));
    const auto y = static_cast<int>(std::lround(fy));
    if (x < 0 || x >= m.width || y < 0 || y >= m.height) continue;
    if (!m.at(x, y) || mask.at(x, y)) continue;
    mask.at(x, y) = 1;
    ++marked;
    drought = 0;
  }
  return mask;
}

HeightMap inject_incompleteness(const HeightMap& z, const Footprint& mask) {
  if (!mask.same_shape(z)) throw Error("incompleteness mask dimensions mismatch");
  HeightMap out = z;
  auto vals = out.values();
  for (size_t i = 0; i < mask.mask.size(); ++i)
    if (mask.mask[i]) vals[i] = 0.0f;
  return out;
}

namespace {

float bilinear(const HeightMap& src, double x, double y) {
  // Zero outside; canopies decay to zero at their rim anyway.
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;
  auto tap = [&](int xi, int yi) -> double {
    if (xi < 0 || xi >= src.width() || yi < 0 || yi >= src.height()) return 0.0;
    return src.at(xi, yi);
  };
  const double top = tap(x0, y0) * (1.0 - fx) + tap(x0 + 1, y0) * fx;
  const double bot = tap(x0, y0 + 1) * (1.0 - fx) + tap(x0 + 1, y0 + 1) * fx;
  return static_cast<float>(top * (1.0 - fy) + bot * fy);
}

// Rotation, xy resize and z scaling fused into one inverse-mapped resample.
HeightMap transform_canopy(const HeightMap& canopy, double rotation_deg, double xy_scale,
                           double z_scale) {
  const int out_w = std::max(1, static_cast<int>(std::lround(canopy.width() * xy_scale)));
  const int out_h = std::max(1, static_cast<int>(std::lround(canopy.height() * xy_scale)));
  HeightMap out(out_w, out_h, canopy.pixel_size());
  const double theta = rotation_deg * std::numbers::pi / 180.0;
  const double c = std::cos(theta), s = std::sin(theta);
  const double ocx = out_w * 0.5, ocy = out_h * 0.5;
  const double icx = canopy.width() * 0.5, icy = canopy.height() * 0.5;
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      const double dx = (x + 0.5 - ocx) / xy_scale;
      const double dy = (y + 0.5 - ocy) / xy_scale;
      const double sx = icx + c * dx + s * dy - 0.5;
      const double sy = icy - s * dx + c * dy - 0.5;
      const float v = bilinear(canopy, sx, sy);
      out.at(x, y) = std::max(0.0f, static_cast<float>(v * z_scale));
    }
  }
  return out;
}

}  // namespace

HeightMap inject_trees(const HeightMap& z, const Footprint& m,
                       std::span<const HeightMap> canopies, const CorruptionSpec& spec,
                       Rng& rng, std::vector<TreePlacement>* placements) {
  if (canopies.empty()) throw Error("inject_trees: tree library is empty");
  HeightMap out = z;
  const int n_trees =
      static_cast<int>(rng.uniform_int(spec.tree_count_min, spec.tree_count_max));
  if (n_trees == 0) return out;

  std::vector<uint32_t> outside;
  outside.reserve(m.mask.size());
  for (uint32_t i = 0; i < m.mask.size(); ++i)
    if (!m.mask[i]) outside.push_back(i);
  if (outside.empty()) throw CannotPlaceTree("no pixel outside the footprint");

  constexpr int kMaxAttempts = 100;
  for (int k = 0; k < n_trees; ++k) {
    TreePlacement rec;
    rec.canopy_index =
        static_cast<int>(rng.uniform_int(0, static_cast<int64_t>(canopies.size()) - 1));
    rec.rotation_deg = rng.uniform(0.0, 360.0);
    rec.xy_scale = rng.uniform(spec.tree_xy_min, spec.tree_xy_max);
    rec.z_scale = rng.uniform(spec.tree_z_min, spec.tree_z_max);
    const HeightMap stamp = transform_canopy(canopies[rec.canopy_index], rec.rotation_deg,
                                             rec.xy_scale, rec.z_scale);
    bool placed = false;
    for (rec.attempts = 1; rec.attempts <= kMaxAttempts; ++rec.attempts) {
      const uint32_t center =
          outside[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(outside.size()) - 1))];
      const int cx = static_cast<int>(center % m.width);
      const int cy = static_cast<int>(center / m.width);
      const int x0 = cx - stamp.width() / 2;
      const int y0 = cy - stamp.height() / 2;
      int replaced = 0;
      for (int ty = 0; ty < stamp.height(); ++ty) {
        const int my = y0 + ty;
        if (my < 0 || my >= out.height()) continue;
        for (int tx = 0; tx < stamp.width(); ++tx) {
          const int mx = x0 + tx;
          if (mx < 0 || mx >= out.width()) continue;
          if (stamp.at(tx, ty) > out.at(mx, my)) ++replaced;
        }
      }
      if (replaced > 0) {
        for (int ty = 0; ty < stamp.height(); ++ty) {
          const int my = y0 + ty;
          if (my < 0 || my >= out.height()) continue;
          for (int tx = 0; tx < stamp.width(); ++tx) {
            const int mx = x0 + tx;
            if (mx < 0 || mx >= out.width()) continue;
            out.at(mx, my) = std::max(out.at(mx, my), stamp.at(tx, ty));
          }
        }
        rec.center_x = cx;
        rec.center_y = cy;
        rec.replaced_pixels = replaced;
        placed = true;
        break;
      }
    }
    rec.accepted = placed;
    if (placements) placements->push_back(rec);
  }
  return out;
}

NormalizedMap inject_global_noise(const NormalizedMap& x, double sigma_max, Rng& rng) {
  if (sigma_max < 0.0) throw ConfigError("global_sigma_max must be >= 0");
  NormalizedMap out = x;
  const double sigma = rng.uniform(0.0, sigma_max);
  if (sigma == 0.0) return out;
  for (size_t i = 0; i < out.data.size(); ++i) {
    if (!out.missing[i]) out.data[i] += static_cast<float>(sigma * rng.normal());
  }
  return out;
}

NormalizedMap inject_outliers(const NormalizedMap& x, double prob, Rng& rng) {
  if (prob < 0.0 || prob > 1.0) throw ConfigError("outlier_prob outside [0, 1]");
  NormalizedMap out = x;
  if (prob == 0.0) return out;
  for (size_t i = 0; i < out.data.size(); ++i) {
    if (out.missing[i]) continue;
    if (rng.uniform() < prob) out.data[i] = static_cast<float>(rng.uniform(-1.0, 1.0));
  }
  return out;
}

SynthesisResult synthesize(const HeightMap& z_gt, const Footprint& m,
                           std::span<const HeightMap> canopies, const CorruptionSpec& spec,
                           MaskMode mask_mode) {
  spec.validate();
  if (!m.same_shape(z_gt)) throw Error("synthesize: footprint dimensions mismatch");
  Rng rng(spec.seed);
  SynthesisResult result{z_gt, {}};
  result.record.seed = spec.seed;

  if (spec.tree_probability > 0.0 && rng.uniform() < spec.tree_probability) {
    result.record.trees_applied = true;
    result.corrupted =
        inject_trees(result.corrupted, m, canopies, spec, rng, &result.record.trees);
  }

  const int before_sparsity = result.corrupted.nonzero_count();
  result.corrupted = inject_sparsity(result.corrupted, m, spec.sparsity_pct, rng);
  result.record.sparsity_removed = before_sparsity - result.corrupted.nonzero_count();

  if (spec.incompleteness_pct > 0.0) {
    const Footprint mask =
        mask_mode == MaskMode::exact_count
            ? incompleteness_mask_benchmark(m, spec.incompleteness_pct, spec, rng)
            : incompleteness_mask_training(m, spec, rng);
    const int before = result.corrupted.nonzero_count();
    result.corrupted = inject_incompleteness(result.corrupted, mask);
    result.record.incompleteness_removed = before - result.corrupted.nonzero_count();
  }
  return result;
}

std::vector<HeightMap> procedural_tree_library(int count, uint64_t seed) {
  std::vector<HeightMap> library;
  library.reserve(count);
  Rng rng(seed);
  for (int k = 0; k < count; ++k) {
    const int n = static_cast<int>(rng.uniform_int(8, 32));
    const double peak = rng.uniform(3.0, 8.0);
    const double cx = n * 0.5, cy = n * 0.5;
    const double radius = n * 0.5;
    HeightMap rough(n, n, 1.0f);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const double dx = (x + 0.5 - cx) / radius;
        const double dy = (y + 0.5 - cy) / radius;
        const double fall = 1.0 - (dx * dx + dy * dy);
        if (fall <= 0.0) continue;
        const double jitter = 0.7 + 0.3 * rng.uniform();
        rough.at(x, y) = static_cast<float>(peak * std::pow(fall, 0.8) * jitter);
      }
    }
    // Light 3x3 smoothing keeps the canopy blobby instead of speckled.
    HeightMap canopy = rough;
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        double sum = 0.0;
        int taps = 0;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int xi = x + dx, yi = y + dy;
            if (xi < 0 || xi >= n || yi < 0 || yi >= n) continue;
            sum += rough.at(xi, yi);
            ++taps;
          }
        }
        canopy.at(x, y) = static_cast<float>(sum / taps);
      }
    }
    library.push_back(std::move(canopy));
  }
  return library;
}

}  // namespace roofkit
