#pragma once

#include <memory>
#include <vector>

#include "roofkit/normalize.hpp"
#include "roofkit/raster.hpp"
#include "roofkit/rng.hpp"
#include "roofkit/schedule.hpp"

namespace roofkit {

// Noise predictor conditioned on the current state, the corrupted input and
// the retention level. Implementations must be deterministic in their inputs
// and parameters; predict() is safe to call concurrently.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual Plane predict(const Plane& x_t, const Plane& cond, double alpha_bar) const = 0;
};

// Noising kernel with footprint masking:
//   x_t = m * (sqrt(abar) * x0 + sqrt(1 - abar) * eps) - (1 - m)
// so pixels outside the footprint sit at exactly -1.
Plane forward_process(double alpha_bar, const Plane& x0, const Plane& eps, const Footprint& m);
Plane forward_process(int t, const Plane& x0, const Plane& eps, const Footprint& m,
                      const DiffusionSchedule& schedule);

// One reverse update:
//   x_{t-1} = (x_t - (1 - a) / sqrt(1 - abar) * eps_hat) / sqrt(a)
//             + sqrt(1 - a) * noise        (noise omitted on the final step)
Plane reverse_step(const Plane& x_t, const SubStep& step, const Plane& eps_hat,
                   bool add_noise, Rng& rng);

// Re-applies the footprint mask: x inside, -1 outside.
void clamp_exterior(Plane& x, const Footprint& m);

// Mean absolute noise-prediction error over footprint pixels.
// Throws EmptyFootprint when the mask has no set pixel.
double masked_l1_loss(const Plane& eps, const Plane& eps_hat, const Footprint& m);

struct Trajectory {
  std::vector<double> fractions;               // requested "percent denoised" / 100
  std::vector<std::pair<double, Plane>> snapshots;
};

// Runs the reverse chain from pure noise, conditioned on `cond` (missing
// pixels are zeros). Returns the restored normalized map with out-of-footprint
// pixels carrying the missing marker; normalization metadata is copied from
// the conditioning input.
NormalizedMap sample(const NormalizedMap& cond, const Footprint& m, const Denoiser& denoiser,
                     const DiffusionSchedule& schedule, int n_steps, Rng& rng,
                     Trajectory* trajectory = nullptr);

// Testing aid: inverts the forward kernel using the ground truth,
//   eps = (x_t - sqrt(abar) * x0) / sqrt(1 - abar)
// inside the footprint, zero outside. With this denoiser the sampler must
// walk back to the ground truth, which isolates sampler bugs from model bugs.
class OracleDenoiser : public Denoiser {
 public:
  OracleDenoiser(Plane x0, Footprint m) : x0_(std::move(x0)), m_(std::move(m)) {}
  Plane predict(const Plane& x_t, const Plane& cond, double alpha_bar) const override;

 private:
  Plane x0_;
  Footprint m_;
};

}  // namespace roofkit
