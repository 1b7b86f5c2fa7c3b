#include "roofkit/benchmark.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "roofkit/errors.hpp"
#include "roofkit/io.hpp"
#include "roofkit/parallel.hpp"

namespace roofkit {

namespace {

constexpr uint64_t kNoiseStream = 0x6e6f697365ULL;    // observation noise
constexpr uint64_t kRestoreStream = 0x726573746fULL;  // sampler randomness

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string sanitize_csv(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

uint64_t sample_seed(uint64_t run_seed, std::string_view sample_id) {
  return mix_seed(run_seed, fnv1a64(sample_id));
}

Observation assemble_observation(const HeightMap& gt, const Footprint& m,
                                 const CorruptionSpec& spec, std::span<const HeightMap> canopies,
                                 uint64_t seed, float range_cap, MaskMode mask_mode) {
  CorruptionSpec local = spec;
  local.seed = seed;
  SynthesisResult synth = synthesize(gt, m, canopies, local, mask_mode);

  NormalizedMap x = normalize(synth.corrupted, range_cap);
  Rng noise_rng(mix_seed(seed, kNoiseStream));
  x = inject_global_noise(x, spec.global_sigma_max, noise_rng);
  x = inject_outliers(x, spec.outlier_prob, noise_rng);

  // Observation in meters: noise can push a value below ground, which a
  // height map cannot represent, so it clips to 0 (= no data).
  HeightMap z_obs = denormalize(x);
  for (auto& v : z_obs.values()) v = std::max(v, 0.0f);

  return {std::move(z_obs), std::move(x), std::move(synth.record)};
}

HeightMap restore(const Observation& obs, const Footprint& m, const HeightMap* gt,
                  const RestoreOptions& options) {
  const std::string& method = options.method;
  if (method == "none") return obs.z_obs;
  if (method == "gt") {
    if (!gt) throw Error("restore: method 'gt' needs the ground truth");
    return *gt;
  }
  if (method == "diffusion") {
    if (!options.denoiser || !options.schedule)
      throw Error("restore: diffusion needs a checkpoint and schedule");
    Footprint fp = m;
    if (options.no_footprint) std::fill(fp.mask.begin(), fp.mask.end(), uint8_t{1});
    Rng rng(mix_seed(options.seed, kRestoreStream));
    const NormalizedMap restored = sample(obs.x_cond, fp, *options.denoiser, *options.schedule,
                                          options.sample_steps, rng);
    HeightMap pred = denormalize(restored);
    for (auto& v : pred.values()) v = std::max(v, 0.0f);
    return pred;
  }
  return inpaint(obs.z_obs, m, inpaint_method_from_string(method), options.inpaint);
}

namespace {

void finalize_report(MetricReport& report) {
  double mae = 0.0, rmse = 0.0, iou = 0.0;
  for (const auto& row : report.rows) {
    if (!row.ok) {
      ++report.failed;
      continue;
    }
    ++report.evaluated;
    mae += row.mae;
    rmse += row.rmse;
    iou += row.iou;
  }
  if (report.evaluated > 0) {
    report.mean_mae = mae / report.evaluated;
    report.mean_rmse = rmse / report.evaluated;
    report.mean_iou = iou / report.evaluated;
  }
}

std::vector<const ManifestEntry*> select_entries(const Manifest& manifest,
                                                 const std::string& split) {
  std::vector<const ManifestEntry*> selected;
  for (const auto& e : manifest.entries)
    if (split.empty() || e.split == split) selected.push_back(&e);
  return selected;
}

}  // namespace

MetricReport run_benchmark(const Manifest& manifest, const BenchmarkConfig& config,
                           std::span<const HeightMap> canopies) {
  const auto entries = select_entries(manifest, config.split);
  MetricReport report;
  report.method = config.restore.method;
  report.preset = config.preset_name;
  report.seed = config.seed;
  report.rows.resize(entries.size());

  parallel_for(static_cast<int64_t>(entries.size()), config.threads, [&](int64_t i) {
    const ManifestEntry& entry = *entries[i];
    SampleMetrics& row = report.rows[i];
    row.id = entry.id;
    try {
      const HeightMap gt = read_rhm(manifest.resolve(entry.gt_path));
      const Footprint fp = read_footprint(manifest.resolve(entry.footprint_path));
      if (!fp.same_shape(gt)) throw Error("footprint dimensions mismatch");

      const uint64_t seed = sample_seed(config.seed, entry.id);
      const Observation obs =
          assemble_observation(gt, fp, config.spec, canopies, seed, config.range_cap);

      RestoreOptions options = config.restore;
      options.seed = seed;
      const HeightMap pred = restore(obs, fp, &gt, options);

      const MaeRmse err = mae_rmse(pred, gt, fp);
      row.mae = err.mae;
      row.rmse = err.rmse;
      row.iou = footprint_iou(pred, fp, config.iou_threshold_m);
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  });

  finalize_report(report);
  return report;
}

MetricReport evaluate_predictions(const Manifest& manifest,
                                  const std::filesystem::path& pred_dir,
                                  const std::string& split, int threads,
                                  double iou_threshold_m) {
  const auto entries = select_entries(manifest, split);
  MetricReport report;
  report.method = "predictions";
  report.rows.resize(entries.size());

  parallel_for(static_cast<int64_t>(entries.size()), threads, [&](int64_t i) {
    const ManifestEntry& entry = *entries[i];
    SampleMetrics& row = report.rows[i];
    row.id = entry.id;
    try {
      const HeightMap gt = read_rhm(manifest.resolve(entry.gt_path));
      const Footprint fp = read_footprint(manifest.resolve(entry.footprint_path));
      const HeightMap pred = read_rhm(pred_dir / (entry.id + "_pred.rhm"));
      const MaeRmse err = mae_rmse(pred, gt, fp);
      row.mae = err.mae;
      row.rmse = err.rmse;
      row.iou = footprint_iou(pred, fp, iou_threshold_m);
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  });

  finalize_report(report);
  return report;
}

void write_report_csv(const std::filesystem::path& path, const MetricReport& report) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os << "id,status,mae_m,rmse_m,iou,error\n";
  for (const auto& row : report.rows) {
    if (row.ok) {
      os << row.id << ",ok," << fmt_double(row.mae) << "," << fmt_double(row.rmse) << ","
         << fmt_double(row.iou) << ",\n";
    } else {
      os << row.id << ",failed,,,," << sanitize_csv(row.error) << "\n";
    }
  }
}

void write_report_json(const std::filesystem::path& path, const MetricReport& report) {
  nlohmann::ordered_json j;
  j["method"] = report.method;
  j["preset"] = report.preset;
  j["seed"] = report.seed;
  j["evaluated"] = report.evaluated;
  j["failed"] = report.failed;
  j["aggregate"] = {{"mae_m", report.mean_mae},
                    {"rmse_m", report.mean_rmse},
                    {"iou", report.mean_iou}};
  auto samples = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json s;
    s["id"] = row.id;
    s["ok"] = row.ok;
    if (row.ok) {
      s["mae_m"] = row.mae;
      s["rmse_m"] = row.rmse;
      s["iou"] = row.iou;
    } else {
      s["error"] = row.error;
    }
    samples.push_back(std::move(s));
  }
  j["samples"] = std::move(samples);
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os << j.dump(2) << "\n";
}

}  // namespace roofkit
