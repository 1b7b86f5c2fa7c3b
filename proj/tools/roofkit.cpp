// roofkit: corrupt, restore and score roof height maps.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "roofkit/benchmark.hpp"
#include "roofkit/config.hpp"
#include "roofkit/corruption.hpp"
#include "roofkit/denoiser.hpp"
#include "roofkit/errors.hpp"
#include "roofkit/io.hpp"
#include "roofkit/manifest.hpp"
#include "roofkit/mesh.hpp"
#include "roofkit/metrics.hpp"
#include "roofkit/parallel.hpp"
#include "roofkit/toyroof.hpp"
#include "roofkit/train.hpp"

namespace fs = std::filesystem;
using namespace roofkit;

namespace {

constexpr uint64_t kTreeLibraryStream = 0x74726565ULL;
constexpr uint64_t kRestoreStream = 0x726573746fULL;

struct CorruptionFlags {
  std::string preset;
  std::string spec_file;
  std::optional<double> sparsity, incompleteness, tree_prob, global_sigma, outlier_prob;
};

void add_corruption_flags(CLI::App* cmd, CorruptionFlags& flags) {
  cmd->add_option("--preset", flags.preset, "corruption preset, e.g. s95_i30");
  cmd->add_option("--spec", flags.spec_file, "corruption config file (TOML or JSON)");
  cmd->add_option("--sparsity", flags.sparsity, "override sparsity percentage");
  cmd->add_option("--incompleteness", flags.incompleteness, "override incompleteness percentage");
  cmd->add_option("--tree-prob", flags.tree_prob, "override tree probability");
  cmd->add_option("--global-sigma-max", flags.global_sigma, "override global noise sigma bound");
  cmd->add_option("--outlier-prob", flags.outlier_prob, "override outlier probability");
}

// defaults < preset < flags < config file
CorruptionSpec resolve_corruption(const CorruptionFlags& flags) {
  CorruptionSpec spec;
  if (!flags.preset.empty()) spec = preset_spec(flags.preset);
  if (flags.sparsity) spec.sparsity_pct = *flags.sparsity;
  if (flags.incompleteness) spec.incompleteness_pct = *flags.incompleteness;
  if (flags.tree_prob) spec.tree_probability = *flags.tree_prob;
  if (flags.global_sigma) spec.global_sigma_max = *flags.global_sigma;
  if (flags.outlier_prob) spec.outlier_prob = *flags.outlier_prob;
  if (!flags.spec_file.empty())
    apply_corruption_config(Config::from_file(flags.spec_file), spec);
  spec.validate();
  return spec;
}

nlohmann::ordered_json corruption_echo(const CorruptionSpec& s, const std::string& preset) {
  nlohmann::ordered_json j;
  j["preset"] = preset;
  j["sparsity_pct"] = s.sparsity_pct;
  j["incompleteness_pct"] = s.incompleteness_pct;
  j["gmm_count"] = s.gmm_count;
  j["sigma_min"] = s.sigma_min;
  j["sigma_max"] = s.sigma_max;
  j["tree_count_min"] = s.tree_count_min;
  j["tree_count_max"] = s.tree_count_max;
  j["tree_xy_min"] = s.tree_xy_min;
  j["tree_xy_max"] = s.tree_xy_max;
  j["tree_z_min"] = s.tree_z_min;
  j["tree_z_max"] = s.tree_z_max;
  j["tree_probability"] = s.tree_probability;
  j["global_sigma_max"] = s.global_sigma_max;
  j["outlier_prob"] = s.outlier_prob;
  return j;
}

void write_echo(const fs::path& path, const nlohmann::ordered_json& j) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os << j.dump(2) << "\n";
}

std::vector<HeightMap> load_tree_library(const std::string& dir, uint64_t seed) {
  if (dir.empty()) return procedural_tree_library(32, mix_seed(seed, kTreeLibraryStream));
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".rhm") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("tree library has no .rhm files: " + dir);
  std::vector<HeightMap> trees;
  trees.reserve(files.size());
  for (const auto& f : files) trees.push_back(read_rhm(f));
  return trees;
}

std::vector<RoofArchetype> parse_archetypes(const std::string& csv) {
  std::vector<RoofArchetype> out;
  std::stringstream ss(csv);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name == "flat") out.push_back(RoofArchetype::flat);
    else if (name == "shed") out.push_back(RoofArchetype::shed);
    else if (name == "gable") out.push_back(RoofArchetype::gable);
    else if (name == "hip") out.push_back(RoofArchetype::hip);
    else if (name == "gable_dormer") out.push_back(RoofArchetype::gable_dormer);
    else throw ConfigError("unknown archetype: " + name);
  }
  if (out.empty()) throw ConfigError("archetype list is empty");
  return out;
}

// ---- gen-toy ---------------------------------------------------------------

struct GenToyArgs {
  std::string out;
  int count = 20;
  int size = 128;
  double pixel_size = 0.25;
  uint64_t seed = 0;
  std::string split = "test";
  std::string archetypes = "flat,shed,gable,hip,gable_dormer";
  bool emit_mesh = false;
};

int run_gen_toy(const GenToyArgs& args) {
  const auto allowed = parse_archetypes(args.archetypes);
  fs::create_directories(args.out);
  Rng rng(args.seed);
  std::vector<ManifestEntry> entries;
  for (int i = 0; i < args.count; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "roof_%04d", i);
    RoofSpec spec = random_roof_spec(rng, args.size * args.pixel_size);
    spec.archetype =
        allowed[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(allowed.size()) - 1))];
    if (spec.archetype == RoofArchetype::flat) spec.ridge_m = spec.eave_m;
    const ToyRoof roof =
        gen_toy_roof(spec, args.size, args.size, static_cast<float>(args.pixel_size));

    const std::string gt_name = std::string(id) + "_gt.rhm";
    const std::string fp_name = std::string(id) + "_fp.rhm";
    const std::string sc_name = std::string(id) + "_gt.json";
    write_rhm(fs::path(args.out) / gt_name, roof.height);
    write_footprint(fs::path(args.out) / fp_name, roof.footprint, roof.height.pixel_size());
    Sidecar sc;
    sc.params = normalize(roof.height).params;
    write_sidecar(fs::path(args.out) / sc_name, sc);
    if (args.emit_mesh) write_obj(fs::path(args.out) / (std::string(id) + ".obj"), roof.mesh);
    entries.push_back({id, gt_name, fp_name, sc_name, args.split});
  }
  write_manifest(fs::path(args.out) / "manifest.csv", entries);
  std::printf("wrote %d roofs to %s\n", args.count, args.out.c_str());
  return 0;
}

// ---- gen-trees -------------------------------------------------------------

int run_gen_trees(const std::string& out, int count, uint64_t seed) {
  fs::create_directories(out);
  const auto trees = procedural_tree_library(count, seed);
  for (size_t i = 0; i < trees.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "tree_%04zu.rhm", i);
    write_rhm(fs::path(out) / name, trees[i]);
  }
  std::printf("wrote %d canopies to %s\n", count, out.c_str());
  return 0;
}

// ---- rasterize -------------------------------------------------------------

struct RasterizeArgs {
  std::string mesh, out, footprint;
  double pixel_size = 0.25;
  int width = 128, height = 128;
};

int run_rasterize(const RasterizeArgs& args) {
  const TriangleMesh mesh = load_obj(args.mesh);
  const HeightMap map =
      rasterize(mesh, static_cast<float>(args.pixel_size), args.width, args.height);
  write_rhm(args.out, map);
  if (!args.footprint.empty())
    write_footprint(args.footprint, infer_footprint(map), map.pixel_size());
  return 0;
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string manifest, out, split, trees;
  CorruptionFlags corruption;
  uint64_t seed = 0;
  int threads = default_thread_count();
};

int run_synth(const SynthArgs& args) {
  const Manifest manifest = load_manifest(args.manifest);
  const CorruptionSpec spec = resolve_corruption(args.corruption);
  const auto trees = load_tree_library(args.trees, args.seed);
  fs::create_directories(args.out);

  std::vector<const ManifestEntry*> entries;
  for (const auto& e : manifest.entries)
    if (args.split.empty() || e.split == args.split) entries.push_back(&e);

  std::vector<std::string> errors(entries.size());
  parallel_for(static_cast<int64_t>(entries.size()), args.threads, [&](int64_t i) {
    const ManifestEntry& entry = *entries[i];
    try {
      const HeightMap gt = read_rhm(manifest.resolve(entry.gt_path));
      const Footprint fp = read_footprint(manifest.resolve(entry.footprint_path));
      const Observation obs =
          assemble_observation(gt, fp, spec, trees, sample_seed(args.seed, entry.id));
      write_rhm(fs::path(args.out) / (entry.id + "_obs.rhm"), obs.z_obs);
      Sidecar sc;
      sc.params = obs.x_cond.params;
      write_sidecar(fs::path(args.out) / (entry.id + "_obs.json"), sc);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  nlohmann::ordered_json echo;
  echo["command"] = "synth";
  echo["seed"] = args.seed;
  echo["corruption"] = corruption_echo(spec, args.corruption.preset);
  write_echo(fs::path(args.out) / "synth_config.json", echo);

  int failures = 0;
  for (size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) {
      ++failures;
      std::fprintf(stderr, "synth %s: %s\n", entries[i]->id.c_str(), errors[i].c_str());
    }
  }
  return failures == 0 ? 0 : 1;
}

// ---- restore ---------------------------------------------------------------

struct RestoreArgs {
  std::string method = "idw";
  std::string in, footprint, sidecar, out;    // single-file mode
  std::string trajectory;                     // comma list of percentages
  std::string manifest, obs_dir, out_dir, split;  // batch mode
  InpaintParams inpaint;
  std::string checkpoint;
  int steps = 250;
  bool no_footprint = false;
  uint64_t seed = 0;
  int threads = default_thread_count();
};

Observation observation_from_files(const fs::path& obs_path, const fs::path& sidecar_path) {
  Observation obs;
  obs.z_obs = read_rhm(obs_path);
  if (!sidecar_path.empty() && fs::exists(sidecar_path)) {
    obs.x_cond = normalize_with(obs.z_obs, read_sidecar(sidecar_path).params);
  } else {
    obs.x_cond = normalize(obs.z_obs);
  }
  return obs;
}

int run_restore(const RestoreArgs& args) {
  RestoreOptions options;
  options.method = args.method;
  options.inpaint = args.inpaint;
  options.sample_steps = args.steps;
  options.no_footprint = args.no_footprint;
  options.seed = args.seed;

  Checkpoint ckpt;
  if (args.method == "diffusion") {
    if (args.checkpoint.empty())
      throw ConfigError("restore --method diffusion needs --checkpoint");
    ckpt = load_checkpoint(args.checkpoint);
    options.denoiser = ckpt.denoiser.get();
    options.schedule = &ckpt.schedule;
    if (!args.no_footprint && ckpt.no_footprint) options.no_footprint = true;
  }

  if (!args.in.empty()) {
    if (args.footprint.empty() || args.out.empty())
      throw ConfigError("restore single-file mode needs --in, --footprint and --out");
    Observation obs = observation_from_files(args.in, args.sidecar);
    const Footprint fp = read_footprint(args.footprint);

    if (!args.trajectory.empty() && args.method == "diffusion") {
      Trajectory traj;
      std::stringstream ss(args.trajectory);
      std::string tok;
      while (std::getline(ss, tok, ',')) traj.fractions.push_back(std::stod(tok) / 100.0);
      Footprint used = fp;
      if (options.no_footprint) std::fill(used.mask.begin(), used.mask.end(), uint8_t{1});
      Rng rng(mix_seed(options.seed, kRestoreStream));
      const NormalizedMap restored = sample(obs.x_cond, used, *options.denoiser,
                                            *options.schedule, options.sample_steps, rng, &traj);
      HeightMap pred = denormalize(restored);
      for (auto& v : pred.values()) v = std::max(v, 0.0f);
      write_rhm(args.out, pred);
      const fs::path out_path(args.out);
      const fs::path stem = out_path.parent_path() / out_path.stem();
      for (const auto& [frac, plane] : traj.snapshots) {
        char suffix[48];
        std::snprintf(suffix, sizeof suffix, "_traj%02d.rhm",
                      static_cast<int>(std::lround(frac * 100)));
        write_rhm_plane(stem.string() + suffix, plane, obs.z_obs.pixel_size());
      }
      return 0;
    }

    const HeightMap pred = restore(obs, fp, nullptr, options);
    write_rhm(args.out, pred);
    return 0;
  }

  if (args.manifest.empty() || args.obs_dir.empty() || args.out_dir.empty())
    throw ConfigError("restore batch mode needs --manifest, --obs-dir and --out-dir");
  const Manifest manifest = load_manifest(args.manifest);
  fs::create_directories(args.out_dir);
  std::vector<const ManifestEntry*> entries;
  for (const auto& e : manifest.entries)
    if (args.split.empty() || e.split == args.split) entries.push_back(&e);

  std::vector<std::string> errors(entries.size());
  parallel_for(static_cast<int64_t>(entries.size()), args.threads, [&](int64_t i) {
    const ManifestEntry& entry = *entries[i];
    try {
      Observation obs =
          observation_from_files(fs::path(args.obs_dir) / (entry.id + "_obs.rhm"),
                                 fs::path(args.obs_dir) / (entry.id + "_obs.json"));
      const Footprint fp = read_footprint(manifest.resolve(entry.footprint_path));
      RestoreOptions local = options;
      local.seed = sample_seed(args.seed, entry.id);
      const HeightMap pred = restore(obs, fp, nullptr, local);
      write_rhm(fs::path(args.out_dir) / (entry.id + "_pred.rhm"), pred);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  int failures = 0;
  for (size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) {
      ++failures;
      std::fprintf(stderr, "restore %s: %s\n", entries[i]->id.c_str(), errors[i].c_str());
    }
  }
  return failures == 0 ? 0 : 1;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string manifest, split = "train", trees, out = "denoiser.rdck", loss_log;
  CorruptionFlags corruption;
  TrainConfig config;
  std::string channels = "8,16";
  int T = 2000;
  double beta_start = 1e-6, beta_end = 0.01;
  double range_cap = 10.0;
};

int run_train(const TrainArgs& args) {
  const Manifest manifest = load_manifest(args.manifest);
  const CorruptionSpec spec = resolve_corruption(args.corruption);
  const auto trees = load_tree_library(args.trees, args.config.seed);

  std::vector<HeightMap> gts;
  std::vector<Footprint> fps;
  for (const auto& entry : manifest.entries) {
    if (!args.split.empty() && entry.split != args.split) continue;
    gts.push_back(read_rhm(manifest.resolve(entry.gt_path)));
    fps.push_back(read_footprint(manifest.resolve(entry.footprint_path)));
  }
  if (gts.empty()) throw Error("train: no samples with split '" + args.split + "'");

  DenoiserConfig dcfg;
  dcfg.channels.clear();
  {
    std::stringstream ss(args.channels);
    std::string tok;
    while (std::getline(ss, tok, ',')) dcfg.channels.push_back(std::stoi(tok));
  }
  ReferenceDenoiser denoiser(dcfg, mix_seed(args.config.seed, 0x696e6974ULL));
  std::printf("denoiser parameters: %zu\n", denoiser.param_count());

  const DiffusionSchedule schedule = make_schedule(args.T, args.beta_start, args.beta_end);
  const float cap = static_cast<float>(args.range_cap);

  SampleSource source = [&](Rng& rng) -> TrainSample {
    for (int attempt = 0; attempt < 100; ++attempt) {
      const auto idx =
          static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(gts.size()) - 1));
      const uint64_t draw_seed = rng.next_u64();
      try {
        Observation obs = assemble_observation(gts[idx], fps[idx], spec, trees, draw_seed, cap,
                                               MaskMode::per_pixel);
        TrainSample sample;
        sample.cond = obs.x_cond.plane();
        sample.x0 = normalize_with(gts[idx], obs.x_cond.params).plane();
        sample.m = fps[idx];
        return sample;
      } catch (const NoRoofData&) {
        // corruption wiped the map; draw again
      }
    }
    throw Error("train: could not synthesize a usable sample in 100 attempts");
  };

  const std::vector<double> losses = train(denoiser, schedule, source, args.config);
  save_checkpoint(args.out, denoiser, schedule, cap, args.config.no_footprint);
  std::printf("checkpoint written to %s\n", args.out.c_str());

  if (!args.loss_log.empty()) {
    std::ofstream os(args.loss_log);
    os << "step,loss\n";
    for (size_t i = 0; i < losses.size(); ++i) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "%zu,%.9g\n", i + 1, losses[i]);
      os << buf;
    }
  }
  return 0;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string manifest, split, trees, out = ".";
  std::string method = "idw";
  std::string pred_dir;
  CorruptionFlags corruption;
  InpaintParams inpaint;
  std::string checkpoint;
  int steps = 250;
  bool no_footprint = false;
  uint64_t seed = 0;
  int threads = default_thread_count();
};

int write_eval_outputs(const EvalArgs& args, const MetricReport& report,
                       const CorruptionSpec* spec) {
  fs::create_directories(args.out);
  write_report_csv(fs::path(args.out) / "report.csv", report);
  write_report_json(fs::path(args.out) / "report.json", report);

  nlohmann::ordered_json echo;
  echo["command"] = "eval";
  echo["method"] = args.method;
  echo["seed"] = args.seed;
  echo["steps"] = args.steps;
  echo["no_footprint"] = args.no_footprint;
  if (spec) echo["corruption"] = corruption_echo(*spec, args.corruption.preset);
  write_echo(fs::path(args.out) / "config_echo.json", echo);

  std::printf("evaluated %d samples (%d failed): mae %.4f m, rmse %.4f m, iou %.4f\n",
              report.evaluated, report.failed, report.mean_mae, report.mean_rmse,
              report.mean_iou);
  for (const auto& row : report.rows)
    if (!row.ok) std::fprintf(stderr, "eval %s: %s\n", row.id.c_str(), row.error.c_str());
  return report.failed == 0 ? 0 : 1;
}

int run_eval(const EvalArgs& args) {
  const Manifest manifest = load_manifest(args.manifest);

  if (!args.pred_dir.empty()) {
    const MetricReport report =
        evaluate_predictions(manifest, args.pred_dir, args.split, args.threads);
    return write_eval_outputs(args, report, nullptr);
  }

  BenchmarkConfig config;
  config.spec = resolve_corruption(args.corruption);
  config.preset_name = args.corruption.preset;
  config.seed = args.seed;
  config.split = args.split;
  config.threads = args.threads;
  config.restore.method = args.method;
  config.restore.inpaint = args.inpaint;
  config.restore.sample_steps = args.steps;
  config.restore.no_footprint = args.no_footprint;

  Checkpoint ckpt;
  if (args.method == "diffusion") {
    if (args.checkpoint.empty()) throw ConfigError("eval --method diffusion needs --checkpoint");
    ckpt = load_checkpoint(args.checkpoint);
    config.restore.denoiser = ckpt.denoiser.get();
    config.restore.schedule = &ckpt.schedule;
    config.range_cap = ckpt.range_cap;
    if (!args.no_footprint && ckpt.no_footprint) config.restore.no_footprint = true;
  }

  const auto trees = load_tree_library(args.trees, args.seed);
  const MetricReport report = run_benchmark(manifest, config, trees);
  return write_eval_outputs(args, report, &config.spec);
}

// ---- sweep-steps -----------------------------------------------------------

struct SweepArgs {
  EvalArgs eval;
  std::string steps_list = "60,125,250,500";
};

int run_sweep(const SweepArgs& args) {
  std::vector<int> step_counts;
  {
    std::stringstream ss(args.steps_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) step_counts.push_back(std::stoi(tok));
  }
  if (step_counts.empty()) throw ConfigError("sweep-steps: empty step list");

  const Manifest manifest = load_manifest(args.eval.manifest);
  if (args.eval.checkpoint.empty()) throw ConfigError("sweep-steps needs --checkpoint");
  const Checkpoint ckpt = load_checkpoint(args.eval.checkpoint);
  const auto trees = load_tree_library(args.eval.trees, args.eval.seed);

  BenchmarkConfig config;
  config.spec = resolve_corruption(args.eval.corruption);
  config.preset_name = args.eval.corruption.preset;
  config.seed = args.eval.seed;
  config.split = args.eval.split;
  config.threads = args.eval.threads;
  config.range_cap = ckpt.range_cap;
  config.restore.method = "diffusion";
  config.restore.denoiser = ckpt.denoiser.get();
  config.restore.schedule = &ckpt.schedule;
  config.restore.no_footprint = args.eval.no_footprint || ckpt.no_footprint;

  fs::create_directories(args.eval.out);
  std::ofstream csv(fs::path(args.eval.out) / "sweep.csv");
  csv << "steps,mae_m,rmse_m,iou,evaluated,failed\n";
  auto rows = nlohmann::ordered_json::array();
  int failures = 0;
  for (int n : step_counts) {
    config.restore.sample_steps = n;
    const MetricReport report = run_benchmark(manifest, config, trees);
    failures += report.failed;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,%d,%d\n", n, report.mean_mae,
                  report.mean_rmse, report.mean_iou, report.evaluated, report.failed);
    csv << buf;
    rows.push_back({{"steps", n},
                    {"mae_m", report.mean_mae},
                    {"rmse_m", report.mean_rmse},
                    {"iou", report.mean_iou},
                    {"evaluated", report.evaluated},
                    {"failed", report.failed}});
    std::printf("steps %4d: mae %.4f m, rmse %.4f m\n", n, report.mean_mae, report.mean_rmse);
  }
  nlohmann::ordered_json j;
  j["command"] = "sweep-steps";
  j["seed"] = args.eval.seed;
  j["rows"] = std::move(rows);
  write_echo(fs::path(args.eval.out) / "sweep.json", j);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"roof height-map corruption, restoration and benchmark toolkit"};
  app.require_subcommand(1);

  GenToyArgs gen_toy;
  auto* cmd_gen_toy = app.add_subcommand("gen-toy", "generate a procedural roof dataset");
  cmd_gen_toy->add_option("--out", gen_toy.out, "output directory")->required();
  cmd_gen_toy->add_option("--count", gen_toy.count, "number of roofs");
  cmd_gen_toy->add_option("--size", gen_toy.size, "raster size in pixels");
  cmd_gen_toy->add_option("--pixel-size", gen_toy.pixel_size, "meters per pixel");
  cmd_gen_toy->add_option("--seed", gen_toy.seed, "rng seed");
  cmd_gen_toy->add_option("--split", gen_toy.split, "split tag for the manifest");
  cmd_gen_toy->add_option("--archetypes", gen_toy.archetypes, "comma list of roof archetypes");
  cmd_gen_toy->add_flag("--emit-mesh", gen_toy.emit_mesh, "also write OBJ meshes");

  std::string trees_out;
  int trees_count = 32;
  uint64_t trees_seed = 0;
  auto* cmd_gen_trees = app.add_subcommand("gen-trees", "generate a procedural canopy library");
  cmd_gen_trees->add_option("--out", trees_out, "output directory")->required();
  cmd_gen_trees->add_option("--count", trees_count, "number of canopies");
  cmd_gen_trees->add_option("--seed", trees_seed, "rng seed");

  RasterizeArgs rasterize_args;
  auto* cmd_rasterize = app.add_subcommand("rasterize", "rasterize a triangle mesh");
  cmd_rasterize->add_option("--mesh", rasterize_args.mesh, "input OBJ")->required();
  cmd_rasterize->add_option("--out", rasterize_args.out, "output RHM")->required();
  cmd_rasterize->add_option("--pixel-size", rasterize_args.pixel_size, "meters per pixel");
  cmd_rasterize->add_option("--width", rasterize_args.width, "grid width");
  cmd_rasterize->add_option("--height", rasterize_args.height, "grid height");
  cmd_rasterize->add_option("--footprint", rasterize_args.footprint,
                            "also write the inferred footprint");

  SynthArgs synth_args;
  auto* cmd_synth = app.add_subcommand("synth", "synthesize corrupted observations");
  cmd_synth->add_option("--manifest", synth_args.manifest, "dataset manifest")->required();
  cmd_synth->add_option("--out", synth_args.out, "output directory")->required();
  cmd_synth->add_option("--split", synth_args.split, "only process this split");
  cmd_synth->add_option("--trees", synth_args.trees, "canopy library directory");
  cmd_synth->add_option("--seed", synth_args.seed, "run seed");
  cmd_synth->add_option("--threads", synth_args.threads, "worker threads");
  add_corruption_flags(cmd_synth, synth_args.corruption);

  RestoreArgs restore_args;
  auto* cmd_restore = app.add_subcommand("restore", "restore corrupted observations");
  cmd_restore->add_option("--method", restore_args.method,
                          "none|nearest|linear|spline|idw|pmdiff|diffusion");
  cmd_restore->add_option("--in", restore_args.in, "single observation RHM");
  cmd_restore->add_option("--footprint", restore_args.footprint, "footprint RHM (single mode)");
  cmd_restore->add_option("--sidecar", restore_args.sidecar, "normalization sidecar JSON");
  cmd_restore->add_option("--out", restore_args.out, "output RHM (single mode)");
  cmd_restore->add_option("--trajectory", restore_args.trajectory,
                          "comma list of denoise percentages to dump");
  cmd_restore->add_option("--manifest", restore_args.manifest, "dataset manifest (batch mode)");
  cmd_restore->add_option("--obs-dir", restore_args.obs_dir, "directory with *_obs.rhm");
  cmd_restore->add_option("--out-dir", restore_args.out_dir, "directory for *_pred.rhm");
  cmd_restore->add_option("--split", restore_args.split, "only process this split");
  cmd_restore->add_option("--idw-power", restore_args.inpaint.idw_power, "IDW exponent");
  cmd_restore->add_option("--idw-neighbors", restore_args.inpaint.idw_neighbors,
                          "IDW neighbor count");
  cmd_restore->add_option("--pm-k", restore_args.inpaint.pm_k, "diffusion conductance scale");
  cmd_restore->add_option("--pm-iterations", restore_args.inpaint.pm_iterations,
                          "diffusion iterations");
  cmd_restore->add_option("--pm-dt", restore_args.inpaint.pm_dt, "diffusion time step");
  cmd_restore->add_option("--checkpoint", restore_args.checkpoint, "denoiser checkpoint");
  cmd_restore->add_option("--steps", restore_args.steps, "sampler steps");
  cmd_restore->add_flag("--no-footprint", restore_args.no_footprint,
                        "sample with an all-ones mask");
  cmd_restore->add_option("--seed", restore_args.seed, "sampler seed");
  cmd_restore->add_option("--threads", restore_args.threads, "worker threads");

  TrainArgs train_args;
  auto* cmd_train = app.add_subcommand("train", "train the reference denoiser");
  cmd_train->add_option("--manifest", train_args.manifest, "dataset manifest")->required();
  cmd_train->add_option("--split", train_args.split, "training split tag");
  cmd_train->add_option("--trees", train_args.trees, "canopy library directory");
  cmd_train->add_option("--out", train_args.out, "checkpoint path");
  cmd_train->add_option("--loss-log", train_args.loss_log, "per-step loss CSV");
  cmd_train->add_option("--steps", train_args.config.steps, "optimizer steps");
  cmd_train->add_option("--batch", train_args.config.batch_size, "batch size");
  cmd_train->add_option("--lr", train_args.config.learning_rate, "learning rate");
  cmd_train->add_option("--momentum", train_args.config.momentum, "momentum");
  cmd_train->add_option("--warmup", train_args.config.warmup_steps, "warm-up steps");
  cmd_train->add_option("--warmup-factor", train_args.config.warmup_factor,
                        "initial warm-up factor");
  cmd_train->add_option("--seed", train_args.config.seed, "training seed");
  cmd_train->add_flag("--no-footprint", train_args.config.no_footprint,
                      "train with an all-ones mask");
  cmd_train->add_option("--log-every", train_args.config.log_every, "loss print period");
  cmd_train->add_option("--channels", train_args.channels, "denoiser channels per level");
  cmd_train->add_option("--T", train_args.T, "diffusion steps");
  cmd_train->add_option("--beta-start", train_args.beta_start, "schedule start");
  cmd_train->add_option("--beta-end", train_args.beta_end, "schedule end");
  cmd_train->add_option("--range-cap", train_args.range_cap, "normalization cap in meters");
  add_corruption_flags(cmd_train, train_args.corruption);

  EvalArgs eval_args;
  auto* cmd_eval = app.add_subcommand("eval", "run the benchmark and write reports");
  cmd_eval->add_option("--manifest", eval_args.manifest, "dataset manifest")->required();
  cmd_eval->add_option("--split", eval_args.split, "only evaluate this split");
  cmd_eval->add_option("--trees", eval_args.trees, "canopy library directory");
  cmd_eval->add_option("--out", eval_args.out, "report directory");
  cmd_eval->add_option("--method", eval_args.method,
                       "none|gt|nearest|linear|spline|idw|pmdiff|diffusion");
  cmd_eval->add_option("--pred-dir", eval_args.pred_dir,
                       "score existing *_pred.rhm instead of restoring");
  cmd_eval->add_option("--idw-power", eval_args.inpaint.idw_power, "IDW exponent");
  cmd_eval->add_option("--idw-neighbors", eval_args.inpaint.idw_neighbors, "IDW neighbor count");
  cmd_eval->add_option("--pm-k", eval_args.inpaint.pm_k, "diffusion conductance scale");
  cmd_eval->add_option("--pm-iterations", eval_args.inpaint.pm_iterations,
                       "diffusion iterations");
  cmd_eval->add_option("--pm-dt", eval_args.inpaint.pm_dt, "diffusion time step");
  cmd_eval->add_option("--checkpoint", eval_args.checkpoint, "denoiser checkpoint");
  cmd_eval->add_option("--steps", eval_args.steps, "sampler steps");
  cmd_eval->add_flag("--no-footprint", eval_args.no_footprint, "sample with an all-ones mask");
  cmd_eval->add_option("--seed", eval_args.seed, "run seed");
  cmd_eval->add_option("--threads", eval_args.threads, "worker threads");
  add_corruption_flags(cmd_eval, eval_args.corruption);

  SweepArgs sweep_args;
  auto* cmd_sweep = app.add_subcommand("sweep-steps", "metric rows across sampler step counts");
  cmd_sweep->add_option("--manifest", sweep_args.eval.manifest, "dataset manifest")->required();
  cmd_sweep->add_option("--split", sweep_args.eval.split, "only evaluate this split");
  cmd_sweep->add_option("--trees", sweep_args.eval.trees, "canopy library directory");
  cmd_sweep->add_option("--out", sweep_args.eval.out, "report directory");
  cmd_sweep->add_option("--checkpoint", sweep_args.eval.checkpoint, "denoiser checkpoint")
      ->required();
  cmd_sweep->add_option("--steps", sweep_args.steps_list, "comma list of step counts");
  cmd_sweep->add_flag("--no-footprint", sweep_args.eval.no_footprint,
                      "sample with an all-ones mask");
  cmd_sweep->add_option("--seed", sweep_args.eval.seed, "run seed");
  cmd_sweep->add_option("--threads", sweep_args.eval.threads, "worker threads");
  add_corruption_flags(cmd_sweep, sweep_args.eval.corruption);

  std::string export_in, export_out;
  double export_cap = 10.0;
  auto* cmd_export = app.add_subcommand("export", "export an RHM as 16-bit grayscale PGM");
  cmd_export->add_option("--in", export_in, "input RHM")->required();
  cmd_export->add_option("--out", export_out, "output PGM")->required();
  cmd_export->add_option("--range-cap", export_cap, "meters mapped to full white");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion") {
      return app.exit(e);
    }
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_gen_toy->parsed()) return run_gen_toy(gen_toy);
    if (cmd_gen_trees->parsed()) return run_gen_trees(trees_out, trees_count, trees_seed);
    if (cmd_rasterize->parsed()) return run_rasterize(rasterize_args);
    if (cmd_synth->parsed()) return run_synth(synth_args);
    if (cmd_restore->parsed()) return run_restore(restore_args);
    if (cmd_train->parsed()) return run_train(train_args);
    if (cmd_eval->parsed()) return run_eval(eval_args);
    if (cmd_sweep->parsed()) return run_sweep(sweep_args);
    if (cmd_export->parsed()) {
      write_pgm16(export_out, read_rhm(export_in), static_cast<float>(export_cap));
      return 0;
    }
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
