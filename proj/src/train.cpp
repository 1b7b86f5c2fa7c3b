#include "roofkit/train.hpp"

#include <cmath>
#include <cstdio>

#include "roofkit/diffusion.hpp"
#include "roofkit/errors.hpp"

namespace roofkit {

std::vector<double> train(TrainableDenoiser& denoiser, const DiffusionSchedule& schedule,
                          const SampleSource& source, const TrainConfig& config) {
  Rng rng(config.seed);
  std::vector<double> velocity(denoiser.params().size(), 0.0);
  std::vector<double> losses;
  losses.reserve(config.steps);

  for (int step = 0; step < config.steps; ++step) {
    denoiser.zero_grads();
    double batch_loss = 0.0;
    for (int b = 0; b < config.batch_size; ++b) {
      TrainSample sample = source(rng);
      Footprint m = sample.m;
      if (config.no_footprint) std::fill(m.mask.begin(), m.mask.end(), uint8_t{1});

      const int t = static_cast<int>(rng.uniform_int(1, schedule.T));
      Plane eps(sample.x0.width, sample.x0.height);
      for (auto& v : eps.v) v = static_cast<float>(rng.normal());

      const Plane x_t = forward_process(t, sample.x0, eps, m, schedule);
      const Plane eps_hat = denoiser.forward_train(x_t, sample.cond, schedule.alpha_bar[t]);
      batch_loss += masked_l1_loss(eps, eps_hat, m);

      // dL/deps_hat = -sign(eps - eps_hat) / |m| inside the footprint.
      const double inv_count = 1.0 / m.popcount();
      Plane grad(eps.width, eps.height);
      for (size_t i = 0; i < grad.v.size(); ++i) {
        if (!m.mask[i]) continue;
        const double r = static_cast<double>(eps.v[i]) - eps_hat.v[i];
        grad.v[i] = static_cast<float>(r > 0.0 ? -inv_count : (r < 0.0 ? inv_count : 0.0));
      }
      denoiser.backward(grad);
    }
    batch_loss /= config.batch_size;
    if (!std::isfinite(batch_loss))
      throw Error("training diverged: loss is not finite at step " + std::to_string(step));
    losses.push_back(batch_loss);

    double lr = config.learning_rate;
    if (config.warmup_steps > 0 && step < config.warmup_steps) {
      const double ramp = static_cast<double>(step) / config.warmup_steps;
      lr *= config.warmup_factor + (1.0 - config.warmup_factor) * ramp;
    }
    auto& params = denoiser.params();
    auto& grads = denoiser.grads();
    const double inv_batch = 1.0 / config.batch_size;
    for (size_t i = 0; i < params.size(); ++i) {
      velocity[i] = config.momentum * velocity[i] - lr * grads[i] * inv_batch;
      params[i] += velocity[i];
    }

    if (config.log_every > 0 && (step + 1) % config.log_every == 0) {
      std::fprintf(stderr, "step %5d  loss %.4f\n", step + 1, batch_loss);
    }
  }
  return losses;
}

}  // namespace roofkit
