#include "roofkit/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "roofkit/errors.hpp"
#include "roofkit/rng.hpp"

namespace roofkit {

void TrainableDenoiser::zero_grads() {
  auto& g = grads();
  std::fill(g.begin(), g.end(), 0.0);
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Tensor silu(const Tensor& x) {
  Tensor y = x;
  for (auto& v : y.v) v = v * sigmoid(v);
  return y;
}

// g_in = g_out * d silu(pre) / d pre
Tensor silu_backward(const Tensor& gout, const Tensor& pre) {
  Tensor gin = gout;
  for (size_t i = 0; i < gin.v.size(); ++i) {
    const double s = sigmoid(pre.v[i]);
    gin.v[i] *= s * (1.0 + pre.v[i] * (1.0 - s));
  }
  return gin;
}

Tensor avgpool2(const Tensor& x) {
  Tensor y(x.c, x.h / 2, x.w / 2);
  for (int c = 0; c < x.c; ++c)
    for (int yy = 0; yy < y.h; ++yy)
      for (int xx = 0; xx < y.w; ++xx)
        y.at(c, yy, xx) = 0.25 * (x.at(c, 2 * yy, 2 * xx) + x.at(c, 2 * yy, 2 * xx + 1) +
                                  x.at(c, 2 * yy + 1, 2 * xx) + x.at(c, 2 * yy + 1, 2 * xx + 1));
  return y;
}

Tensor avgpool2_backward(const Tensor& g) {
  Tensor gin(g.c, g.h * 2, g.w * 2);
  for (int c = 0; c < g.c; ++c)
    for (int yy = 0; yy < g.h; ++yy)
      for (int xx = 0; xx < g.w; ++xx) {
        const double share = 0.25 * g.at(c, yy, xx);
        gin.at(c, 2 * yy, 2 * xx) = share;
        gin.at(c, 2 * yy, 2 * xx + 1) = share;
        gin.at(c, 2 * yy + 1, 2 * xx) = share;
        gin.at(c, 2 * yy + 1, 2 * xx + 1) = share;
      }
  return gin;
}

Tensor upsample2(const Tensor& x) {
  Tensor y(x.c, x.h * 2, x.w * 2);
  for (int c = 0; c < x.c; ++c)
    for (int yy = 0; yy < y.h; ++yy)
      for (int xx = 0; xx < y.w; ++xx) y.at(c, yy, xx) = x.at(c, yy / 2, xx / 2);
  return y;
}

Tensor upsample2_backward(const Tensor& g) {
  Tensor gin(g.c, g.h / 2, g.w / 2);
  for (int c = 0; c < g.c; ++c)
    for (int yy = 0; yy < g.h; ++yy)
      for (int xx = 0; xx < g.w; ++xx) gin.at(c, yy / 2, xx / 2) += g.at(c, yy, xx);
  return gin;
}

Tensor concat(const Tensor& a, const Tensor& b) {
  Tensor y(a.c + b.c, a.h, a.w);
  std::copy(a.v.begin(), a.v.end(), y.v.begin());
  std::copy(b.v.begin(), b.v.end(), y.v.begin() + static_cast<ptrdiff_t>(a.v.size()));
  return y;
}

}  // namespace

struct ReferenceDenoiser::Cache {
  std::vector<Tensor> enc_in, enc_a_pre, enc_a_post, enc_b_pre, enc_b_post;
  std::vector<Tensor> cat, dec_a_pre, dec_a_post, dec_b_pre, dec_b_post;
};

ReferenceDenoiser::~ReferenceDenoiser() = default;

ReferenceDenoiser::ReferenceDenoiser(DenoiserConfig config, uint64_t init_seed)
    : config_(std::move(config)) {
  if (config_.channels.empty()) throw ConfigError("denoiser needs at least one level");
  if (config_.in_channels < 1) throw ConfigError("denoiser needs at least one input channel");
  const int L = config_.levels();

  size_t offset = 0;
  auto add_conv = [&](int in_c, int out_c, int k) {
    Conv conv{in_c, out_c, k, offset, offset + static_cast<size_t>(out_c) * in_c * k * k};
    offset = conv.b_off + out_c;
    return conv;
  };
  for (int l = 0; l < L; ++l) {
    const int in_c = l == 0 ? config_.in_channels : config_.channels[l - 1];
    enc_a_.push_back(add_conv(in_c, config_.channels[l], 3));
    enc_b_.push_back(add_conv(config_.channels[l], config_.channels[l], 3));
  }
  for (int l = 0; l < L - 1; ++l) {
    dec_a_.push_back(add_conv(config_.channels[l + 1] + config_.channels[l],
                              config_.channels[l], 3));
    dec_b_.push_back(add_conv(config_.channels[l], config_.channels[l], 3));
  }
  head_ = add_conv(config_.channels[0], 1, 1);

  params_.assign(offset, 0.0);
  grads_.assign(offset, 0.0);
  Rng rng(init_seed);
  auto init_conv = [&](const Conv& conv) {
    const double scale = std::sqrt(2.0 / (conv.in_c * conv.k * conv.k));
    for (size_t i = conv.w_off; i < conv.b_off; ++i) params_[i] = scale * rng.normal();
  };
  for (const auto& c : enc_a_) init_conv(c);
  for (const auto& c : enc_b_) init_conv(c);
  for (const auto& c : dec_a_) init_conv(c);
  for (const auto& c : dec_b_) init_conv(c);
  init_conv(head_);
}

Tensor ReferenceDenoiser::conv_forward(const Conv& conv, const Tensor& x) const {
  const int pad = conv.k / 2;
  Tensor y(conv.out_c, x.h, x.w);
  const double* w = params_.data() + conv.w_off;
  const double* b = params_.data() + conv.b_off;
  for (int oc = 0; oc < conv.out_c; ++oc) {
    for (int yy = 0; yy < x.h; ++yy) {
      for (int xx = 0; xx < x.w; ++xx) {
        double acc = b[oc];
        for (int ic = 0; ic < conv.in_c; ++ic) {
          for (int ky = 0; ky < conv.k; ++ky) {
            const int sy = yy + ky - pad;
            if (sy < 0 || sy >= x.h) continue;
            for (int kx = 0; kx < conv.k; ++kx) {
              const int sx = xx + kx - pad;
              if (sx < 0 || sx >= x.w) continue;
              acc += w[((static_cast<size_t>(oc) * conv.in_c + ic) * conv.k + ky) * conv.k + kx] *
                     x.at(ic, sy, sx);
            }
          }
        }
        y.at(oc, yy, xx) = acc;
      }
    }
  }
  return y;
}

Tensor ReferenceDenoiser::conv_backward(const Conv& conv, const Tensor& x, const Tensor& gout) {
  const int pad = conv.k / 2;
  Tensor gin(x.c, x.h, x.w);
  const double* w = params_.data() + conv.w_off;
  double* gw = grads_.data() + conv.w_off;
  double* gb = grads_.data() + conv.b_off;
  for (int oc = 0; oc < conv.out_c; ++oc) {
    for (int yy = 0; yy < x.h; ++yy) {
      for (int xx = 0; xx < x.w; ++xx) {
        const double g = gout.at(oc, yy, xx);
        if (g == 0.0) continue;
        gb[oc] += g;
        for (int ic = 0; ic < conv.in_c; ++ic) {
          for (int ky = 0; ky < conv.k; ++ky) {
            const int sy = yy + ky - pad;
            if (sy < 0 || sy >= x.h) continue;
            for (int kx = 0; kx < conv.k; ++kx) {
              const int sx = xx + kx - pad;
              if (sx < 0 || sx >= x.w) continue;
              const size_t wi =
                  ((static_cast<size_t>(oc) * conv.in_c + ic) * conv.k + ky) * conv.k + kx;
              gw[wi] += g * x.at(ic, sy, sx);
              gin.at(ic, sy, sx) += g * w[wi];
            }
          }
        }
      }
    }
  }
  return gin;
}

Plane ReferenceDenoiser::run(const Plane& x_t, const Plane& cond, double alpha_bar,
                             Cache* cache) const {
  const int L = config_.levels();
  const int H = x_t.height, W = x_t.width;
  if (cond.width != W || cond.height != H) throw Error("denoiser: x_t / cond dims mismatch");
  const int div = 1 << (L - 1);
  if (H % div != 0 || W % div != 0)
    throw Error("denoiser: input dims must be divisible by 2^(levels-1)");

  Tensor input(config_.in_channels, H, W);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      input.at(0, y, x) = x_t.at(x, y);
      input.at(1, y, x) = cond.at(x, y);
      if (config_.in_channels > 2) input.at(2, y, x) = alpha_bar;
    }
  }

  Cache& cc = *cache;
  cc.enc_in.resize(L);
  cc.enc_a_pre.resize(L);
  cc.enc_a_post.resize(L);
  cc.enc_b_pre.resize(L);
  cc.enc_b_post.resize(L);
  cc.cat.resize(std::max(0, L - 1));
  cc.dec_a_pre.resize(std::max(0, L - 1));
  cc.dec_a_post.resize(std::max(0, L - 1));
  cc.dec_b_pre.resize(std::max(0, L - 1));
  cc.dec_b_post.resize(std::max(0, L - 1));

  Tensor f = std::move(input);
  for (int l = 0; l < L; ++l) {
    if (l > 0) f = avgpool2(f);
    cc.enc_in[l] = f;
    cc.enc_a_pre[l] = conv_forward(enc_a_[l], cc.enc_in[l]);
    cc.enc_a_post[l] = silu(cc.enc_a_pre[l]);
    cc.enc_b_pre[l] = conv_forward(enc_b_[l], cc.enc_a_post[l]);
    cc.enc_b_post[l] = silu(cc.enc_b_pre[l]);
    f = cc.enc_b_post[l];
  }

  Tensor d = cc.enc_b_post[L - 1];
  for (int l = L - 2; l >= 0; --l) {
    cc.cat[l] = concat(upsample2(d), cc.enc_b_post[l]);
    cc.dec_a_pre[l] = conv_forward(dec_a_[l], cc.cat[l]);
    cc.dec_a_post[l] = silu(cc.dec_a_pre[l]);
    cc.dec_b_pre[l] = conv_forward(dec_b_[l], cc.dec_a_post[l]);
    cc.dec_b_post[l] = silu(cc.dec_b_pre[l]);
    d = cc.dec_b_post[l];
  }

  const Tensor out = conv_forward(head_, d);
  Plane result(W, H);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) result.at(x, y) = static_cast<float>(out.at(0, y, x));
  return result;
}

Plane ReferenceDenoiser::predict(const Plane& x_t, const Plane& cond, double alpha_bar) const {
  Cache scratch;
  return run(x_t, cond, alpha_bar, &scratch);
}

Plane ReferenceDenoiser::forward_train(const Plane& x_t, const Plane& cond, double alpha_bar) {
  if (!cache_) cache_ = std::make_unique<Cache>();
  return run(x_t, cond, alpha_bar, cache_.get());
}

void ReferenceDenoiser::backward(const Plane& dloss_dout) {
  if (!cache_ || cache_->enc_in.empty()) throw Error("backward without forward_train");
  Cache& cc = *cache_;
  const int L = config_.levels();
  const int H = dloss_dout.height, W = dloss_dout.width;

  Tensor g(1, H, W);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) g.at(0, y, x) = dloss_dout.at(x, y);

  const Tensor& head_in = L > 1 ? cc.dec_b_post[0] : cc.enc_b_post[L - 1];
  g = conv_backward(head_, head_in, g);

  std::vector<Tensor> skip_grad(std::max(0, L - 1));
  for (int l = 0; l < L - 1; ++l) {
    g = silu_backward(g, cc.dec_b_pre[l]);
    g = conv_backward(dec_b_[l], cc.dec_a_post[l], g);
    g = silu_backward(g, cc.dec_a_pre[l]);
    g = conv_backward(dec_a_[l], cc.cat[l], g);
    // Split the concat gradient: upsampled deep path first, then the skip.
    const int up_c = config_.channels[l + 1];
    Tensor g_up(up_c, g.h, g.w);
    Tensor g_skip(config_.channels[l], g.h, g.w);
    std::copy(g.v.begin(), g.v.begin() + static_cast<ptrdiff_t>(g_up.v.size()), g_up.v.begin());
    std::copy(g.v.begin() + static_cast<ptrdiff_t>(g_up.v.size()), g.v.end(), g_skip.v.begin());
    skip_grad[l] = std::move(g_skip);
    g = upsample2_backward(g_up);
  }

  for (int l = L - 1; l >= 0; --l) {
    g = silu_backward(g, cc.enc_b_pre[l]);
    g = conv_backward(enc_b_[l], cc.enc_a_post[l], g);
    g = silu_backward(g, cc.enc_a_pre[l]);
    g = conv_backward(enc_a_[l], cc.enc_in[l], g);
    if (l > 0) {
      g = avgpool2_backward(g);
      for (size_t i = 0; i < g.v.size(); ++i) g.v[i] += skip_grad[l - 1].v[i];
    }
  }
}

Plane LinearDenoiser::predict(const Plane& x_t, const Plane& cond, double /*alpha_bar*/) const {
  Plane out(x_t.width, x_t.height);
  for (size_t i = 0; i < out.v.size(); ++i)
    out.v[i] = static_cast<float>(params_[0] * x_t.v[i] + params_[1] * cond.v[i] + params_[2]);
  return out;
}

Plane LinearDenoiser::forward_train(const Plane& x_t, const Plane& cond, double alpha_bar) {
  x_t_ = x_t;
  cond_ = cond;
  return predict(x_t, cond, alpha_bar);
}

void LinearDenoiser::backward(const Plane& dloss_dout) {
  for (size_t i = 0; i < dloss_dout.v.size(); ++i) {
    const double g = dloss_dout.v[i];
    grads_[0] += g * x_t_.v[i];
    grads_[1] += g * cond_.v[i];
    grads_[2] += g;
  }
}

namespace {

constexpr char kCkptMagic[4] = {'R', 'D', 'C', 'K'};

void write_tensor(std::ostream& os, std::span<const double> data,
                  std::span<const uint32_t> dims) {
  const auto rank = static_cast<uint32_t>(dims.size());
  os.write(reinterpret_cast<const char*>(&rank), sizeof rank);
  for (uint32_t d : dims) os.write(reinterpret_cast<const char*>(&d), sizeof d);
  for (double v : data) {
    const auto f = static_cast<float>(v);
    os.write(reinterpret_cast<const char*>(&f), sizeof f);
  }
}

size_t read_tensor(std::istream& is, std::span<double> out,
                   std::span<const uint32_t> expect_dims) {
  uint32_t rank = 0;
  is.read(reinterpret_cast<char*>(&rank), sizeof rank);
  if (!is || rank != expect_dims.size()) throw IoError("checkpoint: tensor rank mismatch");
  size_t count = 1;
  for (uint32_t expected : expect_dims) {
    uint32_t d = 0;
    is.read(reinterpret_cast<char*>(&d), sizeof d);
    if (!is || d != expected) throw IoError("checkpoint: tensor shape mismatch");
    count *= d;
  }
  if (count != out.size()) throw IoError("checkpoint: tensor size mismatch");
  for (auto& v : out) {
    float f = 0;
    is.read(reinterpret_cast<char*>(&f), sizeof f);
    v = f;
  }
  if (!is) throw IoError("checkpoint: truncated tensor data");
  return count;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ReferenceDenoiser& denoiser,
                     const DiffusionSchedule& schedule, float range_cap, bool no_footprint) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["channels"] = denoiser.config().channels;
  j["in_channels"] = denoiser.config().in_channels;
  j["T"] = schedule.T;
  j["beta_start"] = schedule.beta_start;
  j["beta_end"] = schedule.beta_end;
  j["range_cap"] = range_cap;
  j["no_footprint"] = no_footprint;
  const std::string header = j.dump();
  os.write(kCkptMagic, 4);
  const auto len = static_cast<uint32_t>(header.size());
  os.write(reinterpret_cast<const char*>(&len), sizeof len);
  os.write(header.data(), static_cast<std::streamsize>(header.size()));

  // Layers in construction order; each conv dumps weights then bias.
  const auto& params = denoiser.params();
  const DenoiserConfig& cfg = denoiser.config();
  const int L = cfg.levels();
  size_t off = 0;
  auto dump_conv = [&](int in_c, int out_c, int k) {
    const size_t wn = static_cast<size_t>(out_c) * in_c * k * k;
    const uint32_t wd[4] = {static_cast<uint32_t>(out_c), static_cast<uint32_t>(in_c),
                            static_cast<uint32_t>(k), static_cast<uint32_t>(k)};
    write_tensor(os, std::span(params).subspan(off, wn), wd);
    off += wn;
    const uint32_t bd[1] = {static_cast<uint32_t>(out_c)};
    write_tensor(os, std::span(params).subspan(off, static_cast<size_t>(out_c)), bd);
    off += static_cast<size_t>(out_c);
  };
  for (int l = 0; l < L; ++l) {
    dump_conv(l == 0 ? cfg.in_channels : cfg.channels[l - 1], cfg.channels[l], 3);
    dump_conv(cfg.channels[l], cfg.channels[l], 3);
  }
  for (int l = 0; l < L - 1; ++l) {
    dump_conv(cfg.channels[l + 1] + cfg.channels[l], cfg.channels[l], 3);
    dump_conv(cfg.channels[l], cfg.channels[l], 3);
  }
  dump_conv(cfg.channels[0], 1, 1);
  if (!os) throw IoError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kCkptMagic, 4) != 0)
    throw IoError("not a checkpoint file: " + path.string());
  uint32_t len = 0;
  is.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!is || len > (1u << 24)) throw IoError("bad checkpoint header: " + path.string());
  std::string header(len, '\0');
  is.read(header.data(), len);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad checkpoint JSON: ") + e.what());
  }

  Checkpoint ckpt;
  ckpt.config.channels = j.at("channels").get<std::vector<int>>();
  ckpt.config.in_channels = j.at("in_channels").get<int>();
  ckpt.schedule = make_schedule(j.at("T").get<int>(), j.at("beta_start").get<double>(),
                                j.at("beta_end").get<double>());
  ckpt.range_cap = j.at("range_cap").get<float>();
  ckpt.no_footprint = j.value("no_footprint", false);
  ckpt.denoiser = std::make_unique<ReferenceDenoiser>(ckpt.config, 0);

  auto& params = ckpt.denoiser->params();
  const DenoiserConfig& cfg = ckpt.config;
  const int L = cfg.levels();
  size_t off = 0;
  auto load_conv = [&](int in_c, int out_c, int k) {
    const size_t wn = static_cast<size_t>(out_c) * in_c * k * k;
    const uint32_t wd[4] = {static_cast<uint32_t>(out_c), static_cast<uint32_t>(in_c),
                            static_cast<uint32_t>(k), static_cast<uint32_t>(k)};
    read_tensor(is, std::span(params).subspan(off, wn), wd);
    off += wn;
    const uint32_t bd[1] = {static_cast<uint32_t>(out_c)};
    read_tensor(is, std::span(params).subspan(off, static_cast<size_t>(out_c)), bd);
    off += static_cast<size_t>(out_c);
  };
  for (int l = 0; l < L; ++l) {
    load_conv(l == 0 ? cfg.in_channels : cfg.channels[l - 1], cfg.channels[l], 3);
    load_conv(cfg.channels[l], cfg.channels[l], 3);
  }
  for (int l = 0; l < L - 1; ++l) {
    load_conv(cfg.channels[l + 1] + cfg.channels[l], cfg.channels[l], 3);
    load_conv(cfg.channels[l], cfg.channels[l], 3);
  }
  load_conv(cfg.channels[0], 1, 1);
  if (off != params.size()) throw IoError("checkpoint: parameter count mismatch");
  return ckpt;
}

}  // namespace roofkit
