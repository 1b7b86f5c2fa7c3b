#pragma once

#include <functional>
#include <vector>

#include "roofkit/denoiser.hpp"
#include "roofkit/raster.hpp"
#include "roofkit/schedule.hpp"

namespace roofkit {

// One training triple in normalized space. x0 is the clean target expressed
// in the corrupted input's normalization; cond carries zeros at missing
// pixels.
struct TrainSample {
  Plane x0;
  Plane cond;
  Footprint m;
};

// Produces a fresh (typically freshly corrupted) sample per call.
using SampleSource = std::function<TrainSample(Rng&)>;

struct TrainConfig {
  int steps = 2000;
  int batch_size = 16;
  double learning_rate = 0.02;
  double momentum = 0.9;
  int warmup_steps = 200;        // linear ramp from warmup_factor to 1
  double warmup_factor = 0.2;
  uint64_t seed = 0;
  bool no_footprint = false;     // mask replaced by all-ones in loss + forward
  int log_every = 100;           // 0 = silent
};

// SGD with momentum on the footprint-masked L1 noise objective:
// per sample draw t ~ U(1, T), eps ~ N(0, I), push x0 through the forward
// kernel and regress the injected noise. Returns the per-step loss curve.
// Aborts with Error when the loss turns non-finite.
std::vector<double> train(TrainableDenoiser& denoiser, const DiffusionSchedule& schedule,
                          const SampleSource& source, const TrainConfig& config);

}  // namespace roofkit
