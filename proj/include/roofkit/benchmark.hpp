#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "roofkit/corruption.hpp"
#include "roofkit/denoiser.hpp"
#include "roofkit/diffusion.hpp"
#include "roofkit/inpaint.hpp"
#include "roofkit/manifest.hpp"
#include "roofkit/metrics.hpp"

namespace roofkit {

// One corrupted sample ready for restoration. z_obs is the observation in
// meters (clipped at ground level); x_cond is the same data in normalized
// space with the pre-noise normalization, which is also what the sidecar
// records.
struct Observation {
  HeightMap z_obs;
  NormalizedMap x_cond;
  CorruptionRecord record;
};

// Deterministic per-sample seed from the run seed and the sample id.
uint64_t sample_seed(uint64_t run_seed, std::string_view sample_id);

// trees -> sparsity -> incompleteness in meters, then normalization and
// global/outlier noise in normalized space.
Observation assemble_observation(const HeightMap& gt, const Footprint& m,
                                 const CorruptionSpec& spec, std::span<const HeightMap> canopies,
                                 uint64_t seed, float range_cap = 10.0f,
                                 MaskMode mask_mode = MaskMode::exact_count);

struct RestoreOptions {
  std::string method = "idw";  // none | gt | nearest | linear | spline | idw | pmdiff | diffusion
  InpaintParams inpaint;
  const Denoiser* denoiser = nullptr;          // diffusion only
  const DiffusionSchedule* schedule = nullptr;  // diffusion only
  int sample_steps = 250;
  bool no_footprint = false;  // run the sampler with an all-ones mask
  uint64_t seed = 0;          // sampler noise stream
};

// Restores one observation against its footprint. For "diffusion" the
// conditioning is the normalized observation and the output is denormalized
// with the observation's recorded parameters; in footprint mode pixels
// outside m are forced to 0.
HeightMap restore(const Observation& obs, const Footprint& m, const HeightMap* gt,
                  const RestoreOptions& options);

struct SampleMetrics {
  std::string id;
  bool ok = false;
  std::string error;
  double mae = 0.0;
  double rmse = 0.0;
  double iou = 0.0;
};

struct MetricReport {
  std::vector<SampleMetrics> rows;  // manifest order
  double mean_mae = 0.0;
  double mean_rmse = 0.0;
  double mean_iou = 0.0;
  int evaluated = 0;
  int failed = 0;
  // config echo
  std::string method;
  std::string preset;
  uint64_t seed = 0;
};

struct BenchmarkConfig {
  CorruptionSpec spec;
  std::string preset_name;
  uint64_t seed = 0;
  RestoreOptions restore;
  std::string split;  // evaluate only entries with this split tag; empty = all
  int threads = 1;
  float range_cap = 10.0f;
  double iou_threshold_m = 0.1;
};

// Corrupts, restores and scores every manifest entry. Per-sample corruption
// is seeded by (seed, id), so reports are independent of the thread count.
// Unreadable samples are recorded and skipped.
MetricReport run_benchmark(const Manifest& manifest, const BenchmarkConfig& config,
                           std::span<const HeightMap> canopies);

// Scores already-restored predictions (one RHM per id) against the manifest.
MetricReport evaluate_predictions(const Manifest& manifest,
                                  const std::filesystem::path& pred_dir,
                                  const std::string& split, int threads,
                                  double iou_threshold_m = 0.1);

void write_report_csv(const std::filesystem::path& path, const MetricReport& report);
void write_report_json(const std::filesystem::path& path, const MetricReport& report);

}  // namespace roofkit
