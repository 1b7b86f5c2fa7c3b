#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "roofkit/diffusion.hpp"
#include "roofkit/raster.hpp"
#include "roofkit/schedule.hpp"

namespace roofkit {

// CHW tensor of doubles. Small enough at desk scale that double precision is
// free and keeps finite-difference checks tight.
struct Tensor {
  int c = 0, h = 0, w = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int c_, int h_, int w_) : c(c_), h(h_), w(w_), v(static_cast<size_t>(c_) * h_ * w_) {}
  double at(int ch, int y, int x) const {
    return v[(static_cast<size_t>(ch) * h + y) * w + x];
  }
  double& at(int ch, int y, int x) { return v[(static_cast<size_t>(ch) * h + y) * w + x]; }
  size_t size() const { return v.size(); }
};

// Denoiser whose parameters live in one flat vector, with an explicit
// backward pass. params()/grads() share indices.
class TrainableDenoiser : public Denoiser {
 public:
  virtual std::vector<double>& params() = 0;
  virtual const std::vector<double>& params() const = 0;
  virtual std::vector<double>& grads() = 0;
  void zero_grads();

  // Forward pass that caches activations; backward() consumes the cache and
  // accumulates parameter gradients for the given output gradient.
  virtual Plane forward_train(const Plane& x_t, const Plane& cond, double alpha_bar) = 0;
  virtual void backward(const Plane& dloss_dout) = 0;
};

// Encoder-decoder noise predictor. `channels[l]` is the width at resolution
// level l (downsampled by 2 per level); each level runs two 3x3 convs with
// SiLU, the decoder mirrors with skip concatenation, and a 1x1 head emits the
// predicted noise. Input is the (x_t, cond, alpha_bar-broadcast) stack.
struct DenoiserConfig {
  std::vector<int> channels = {8, 16};
  int in_channels = 3;

  int levels() const { return static_cast<int>(channels.size()); }
};

class ReferenceDenoiser : public TrainableDenoiser {
 public:
  ReferenceDenoiser(DenoiserConfig config, uint64_t init_seed);
  ~ReferenceDenoiser() override;

  Plane predict(const Plane& x_t, const Plane& cond, double alpha_bar) const override;
  Plane forward_train(const Plane& x_t, const Plane& cond, double alpha_bar) override;
  void backward(const Plane& dloss_dout) override;

  std::vector<double>& params() override { return params_; }
  const std::vector<double>& params() const override { return params_; }
  std::vector<double>& grads() override { return grads_; }

  const DenoiserConfig& config() const { return config_; }
  size_t param_count() const { return params_.size(); }

 private:
  struct Conv {
    int in_c = 0, out_c = 0, k = 3;
    size_t w_off = 0, b_off = 0;
  };
  struct Cache;

  Plane run(const Plane& x_t, const Plane& cond, double alpha_bar, Cache* cache) const;

  Tensor conv_forward(const Conv& conv, const Tensor& x) const;
  Tensor conv_backward(const Conv& conv, const Tensor& x, const Tensor& gout);

  DenoiserConfig config_;
  std::vector<Conv> enc_a_, enc_b_, dec_a_, dec_b_;
  Conv head_;
  std::vector<double> params_;
  std::vector<double> grads_;
  std::unique_ptr<Cache> cache_;
};

// Three-parameter affine predictor, eps_hat = a * x_t + b * cond + c.
// Mostly a gradient-check and smoke-test vehicle.
class LinearDenoiser : public TrainableDenoiser {
 public:
  LinearDenoiser(double a, double b, double c) : params_{a, b, c}, grads_(3, 0.0) {}

  Plane predict(const Plane& x_t, const Plane& cond, double alpha_bar) const override;
  Plane forward_train(const Plane& x_t, const Plane& cond, double alpha_bar) override;
  void backward(const Plane& dloss_dout) override;

  std::vector<double>& params() override { return params_; }
  const std::vector<double>& params() const override { return params_; }
  std::vector<double>& grads() override { return grads_; }

 private:
  std::vector<double> params_;
  std::vector<double> grads_;
  Plane x_t_, cond_;
};

// Versioned checkpoint: magic "RDCK", config JSON, then per-layer f32 tensors
// with shape headers.
struct Checkpoint {
  DenoiserConfig config;
  DiffusionSchedule schedule;
  float range_cap = 10.0f;
  bool no_footprint = false;
  std::unique_ptr<ReferenceDenoiser> denoiser;
};

void save_checkpoint(const std::filesystem::path& path, const ReferenceDenoiser& denoiser,
                     const DiffusionSchedule& schedule, float range_cap, bool no_footprint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace roofkit
