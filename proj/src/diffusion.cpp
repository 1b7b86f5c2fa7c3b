#include "roofkit/diffusion.hpp"

#include <cmath>

#include "roofkit/errors.hpp"

namespace roofkit {

namespace {

void check_dims(const Plane& a, const Footprint& m) {
  if (a.width != m.width || a.height != m.height)
    throw Error("plane / footprint dimensions mismatch");
}

}  // namespace

Plane forward_process(double alpha_bar, const Plane& x0, const Plane& eps, const Footprint& m) {
  check_dims(x0, m);
  if (x0.size() != eps.size()) throw Error("x0 / eps dimensions mismatch");
  Plane x_t(x0.width, x0.height);
  const double signal = std::sqrt(alpha_bar);
  const double noise = std::sqrt(1.0 - alpha_bar);
  for (size_t i = 0; i < x_t.size(); ++i) {
    x_t.v[i] = m.mask[i]
                   ? static_cast<float>(signal * x0.v[i] + noise * eps.v[i])
                   : -1.0f;
  }
  return x_t;
}

Plane forward_process(int t, const Plane& x0, const Plane& eps, const Footprint& m,
                      const DiffusionSchedule& schedule) {
  if (t < 1 || t > schedule.T) throw Error("forward_process: t outside [1, T]");
  return forward_process(schedule.alpha_bar[t], x0, eps, m);
}

Plane reverse_step(const Plane& x_t, const SubStep& step, const Plane& eps_hat,
                   bool add_noise, Rng& rng) {
  if (x_t.size() != eps_hat.size()) throw Error("x_t / eps_hat dimensions mismatch");
  Plane out(x_t.width, x_t.height);
  const double inv_sqrt_alpha = 1.0 / std::sqrt(step.alpha);
  const double eps_coeff = (1.0 - step.alpha) / std::sqrt(1.0 - step.alpha_bar);
  const double noise_scale = std::sqrt(1.0 - step.alpha);
  for (size_t i = 0; i < out.size(); ++i) {
    double v = inv_sqrt_alpha * (x_t.v[i] - eps_coeff * eps_hat.v[i]);
    if (add_noise) v += noise_scale * rng.normal();
    out.v[i] = static_cast<float>(v);
  }
  return out;
}

void clamp_exterior(Plane& x, const Footprint& m) {
  check_dims(x, m);
  for (size_t i = 0; i < x.size(); ++i)
    if (!m.mask[i]) x.v[i] = -1.0f;
}

double masked_l1_loss(const Plane& eps, const Plane& eps_hat, const Footprint& m) {
  check_dims(eps, m);
  if (eps.size() != eps_hat.size()) throw Error("eps / eps_hat dimensions mismatch");
  double sum = 0.0;
  int64_t count = 0;
  for (size_t i = 0; i < eps.size(); ++i) {
    if (m.mask[i]) {
      sum += std::abs(static_cast<double>(eps.v[i]) - eps_hat.v[i]);
      ++count;
    }
  }
  if (count == 0) throw EmptyFootprint("masked_l1_loss: footprint is empty");
  return sum / static_cast<double>(count);
}

NormalizedMap sample(const NormalizedMap& cond, const Footprint& m, const Denoiser& denoiser,
                     const DiffusionSchedule& schedule, int n_steps, Rng& rng,
                     Trajectory* trajectory) {
  if (cond.width != m.width || cond.height != m.height)
    throw Error("sample: cond / footprint dimensions mismatch");
  const Plane cond_plane = cond.plane();
  const auto steps = substeps(schedule, n_steps);

  Plane x(cond.width, cond.height);
  for (auto& v : x.v) v = static_cast<float>(rng.normal());
  for (size_t i = 0; i < x.size(); ++i)
    x.v[i] = m.mask[i] ? x.v[i] : -1.0f;

  const int n = static_cast<int>(steps.size());
  for (int k = n - 1; k >= 0; --k) {
    const Plane eps_hat = denoiser.predict(x, cond_plane, steps[k].alpha_bar);
    x = reverse_step(x, steps[k], eps_hat, /*add_noise=*/k > 0, rng);
    clamp_exterior(x, m);
    if (trajectory) {
      const double done = static_cast<double>(n - k) / n;
      for (double frac : trajectory->fractions) {
        const double prev = static_cast<double>(n - k - 1) / n;
        if (prev < frac && frac <= done) trajectory->snapshots.emplace_back(frac, x);
      }
    }
  }

  NormalizedMap out;
  out.width = cond.width;
  out.height = cond.height;
  out.pixel_size = cond.pixel_size;
  out.params = cond.params;
  out.data.assign(x.v.begin(), x.v.end());
  out.missing.assign(x.size(), 0);
  for (size_t i = 0; i < x.size(); ++i) {
    if (!m.mask[i]) {
      out.data[i] = 0.0f;
      out.missing[i] = 1;
    }
  }
  return out;
}

Plane OracleDenoiser::predict(const Plane& x_t, const Plane& /*cond*/, double alpha_bar) const {
  Plane eps(x_t.width, x_t.height);
  const double denom_sq = 1.0 - alpha_bar;
  if (denom_sq <= 1e-12) return eps;  // no noise to invert at alpha_bar ~ 1
  const double signal = std::sqrt(alpha_bar);
  const double inv_noise = 1.0 / std::sqrt(denom_sq);
  for (size_t i = 0; i < eps.size(); ++i) {
    eps.v[i] = m_.mask[i]
                   ? static_cast<float>((x_t.v[i] - signal * x0_.v[i]) * inv_noise)
                   : 0.0f;
  }
  return eps;
}

}  // namespace roofkit
