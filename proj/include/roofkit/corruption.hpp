#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "roofkit/normalize.hpp"
#include "roofkit/raster.hpp"
#include "roofkit/rng.hpp"

namespace roofkit {

// Declarative description of one corruption draw. Fully determines the
// synthesized artifacts together with the seed.
struct CorruptionSpec {
  double sparsity_pct = 0.0;         // s: share of footprint pixels removed at random
  double incompleteness_pct = 0.0;   // i: share removed as coherent Gauss-mixture regions
  int gmm_count = 5;                 // G
  double sigma_min = 0.0;            // fraction of max(H, W)
  double sigma_max = 0.3;
  int tree_count_min = 1;
  int tree_count_max = 3;
  double tree_xy_min = 0.5;          // canopy footprint scale range
  double tree_xy_max = 2.0;
  double tree_z_min = 2.0;           // canopy height scale range
  double tree_z_max = 4.0;
  double tree_probability = 0.3;     // chance a sample receives trees at all
  double global_sigma_max = 0.05;    // per-map Gaussian noise, normalized units
  double outlier_prob = 0.0001;      // per-pixel replacement probability
  uint64_t seed = 0;

  void validate() const;  // throws ConfigError on out-of-range fields
};

// Parses preset names of the form "s95_i30" / "s99.75_i0" (underscore or
// space separated); remaining fields keep their defaults.
CorruptionSpec preset_spec(std::string_view name);

// One axis-aligned Gaussian of the incompleteness mixture, in pixel units.
struct GaussComponent {
  double mu_x = 0.0;
  double mu_y = 0.0;
  double sigma_x = 0.0;
  double sigma_y = 0.0;
};

// Draws G components: means uniform over the image, sigmas uniform in
// [sigma_min, sigma_max] * max(width, height) pixels.
std::vector<GaussComponent> draw_gmm_components(int width, int height,
                                                const CorruptionSpec& spec, Rng& rng);

// Unnormalized density of one component at pixel (x, y). A zero sigma
// degenerates to an indicator on the component's mean pixel.
double gauss_density(const GaussComponent& g, double x, double y);

// Mixture density (1/G) * sum_g gauss_density(g, x, y).
double gmm_density(std::span<const GaussComponent> components, double x, double y);

// Sets exactly round(s/100 * |footprint|) footprint pixels to zero, chosen
// uniformly without replacement. Pixels outside the footprint are untouched.
HeightMap inject_sparsity(const HeightMap& z, const Footprint& m, double s_pct, Rng& rng);

// Per-pixel Bernoulli mask: pixel marked when any component's density beats
// an independent U(0,1) draw; result intersected with the footprint.
Footprint incompleteness_mask_training(const Footprint& m,
                                       std::span<const GaussComponent> components,
                                       Rng& rng);
Footprint incompleteness_mask_training(const Footprint& m, const CorruptionSpec& spec,
                                       Rng& rng);

// Rejection-samples mixture draws until exactly round(i/100 * |footprint|)
// distinct in-footprint pixels are marked. When the mixture mass misses the
// footprint for too long, component means are redrawn; a global draw budget
// of 10000 * N_thres guards against non-termination.
Footprint incompleteness_mask_benchmark(const Footprint& m, double i_pct,
                                        const CorruptionSpec& spec, Rng& rng);

// Zeroes the pixels marked in `mask`.
HeightMap inject_incompleteness(const HeightMap& z, const Footprint& mask);

// Per-tree placement record, kept for audits and tests.
struct TreePlacement {
  int center_x = 0;
  int center_y = 0;
  int canopy_index = 0;
  double rotation_deg = 0.0;
  double xy_scale = 1.0;
  double z_scale = 1.0;
  int replaced_pixels = 0;
  int attempts = 1;
  bool accepted = true;
};

// Composites randomly transformed canopies over the map via per-pixel max.
// Centers are drawn from pixels outside the footprint; a placement is
// resampled until it replaces at least one pixel (up to 100 attempts, after
// which the tree is skipped and recorded as rejected).
HeightMap inject_trees(const HeightMap& z, const Footprint& m,
                       std::span<const HeightMap> canopies, const CorruptionSpec& spec,
                       Rng& rng, std::vector<TreePlacement>* placements = nullptr);

// Adds N(0, sigma^2) to every non-missing pixel, with one sigma drawn
// uniformly from [0, sigma_max] per map.
NormalizedMap inject_global_noise(const NormalizedMap& x, double sigma_max, Rng& rng);

// Replaces each non-missing pixel with U(-1, 1) with probability prob.
NormalizedMap inject_outliers(const NormalizedMap& x, double prob, Rng& rng);

// What one synthesize() call actually did.
struct CorruptionRecord {
  uint64_t seed = 0;
  bool trees_applied = false;
  std::vector<TreePlacement> trees;
  int sparsity_removed = 0;
  int incompleteness_removed = 0;
};

struct SynthesisResult {
  HeightMap corrupted;  // meters; zero = removed or never present
  CorruptionRecord record;
};

// Incompleteness flavor: benchmarks need the exact pixel count, training
// augmentation only needs the per-pixel Bernoulli draw.
enum class MaskMode { exact_count, per_pixel };

// Full corruption chain in meters: trees, then sparsity, then incompleteness.
// Global/outlier noise belongs to normalized space and is applied by the
// observation assembly, not here.
SynthesisResult synthesize(const HeightMap& z_gt, const Footprint& m,
                           std::span<const HeightMap> canopies, const CorruptionSpec& spec,
                           MaskMode mask_mode = MaskMode::exact_count);

// Procedural stand-in for a real tree database: radially decaying noise
// blobs, 8-32 px across. Same raster format, so measured canopies can be
// dropped in via a directory of RHM files.
std::vector<HeightMap> procedural_tree_library(int count, uint64_t seed);

}  // namespace roofkit
