#include "roofkit/normalize.hpp"

#include <cmath>
#include <limits>

#include "roofkit/errors.hpp"

namespace roofkit {

Plane NormalizedMap::plane() const {
  Plane p(width, height);
  p.v = data;
  return p;
}

namespace {

NormalizedMap apply(const HeightMap& z, const NormParams& params) {
  NormalizedMap out;
  out.width = z.width();
  out.height = z.height();
  out.pixel_size = z.pixel_size();
  out.params = params;
  out.data.assign(z.size(), 0.0f);
  out.missing.assign(z.size(), 0);

  const double mid = 0.5 * (static_cast<double>(params.z_min) + params.z_max);
  const double scale = 2.0 * params.extra_scale / params.range_cap;
  const auto vals = z.values();
  for (size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] > 0.0f) {
      out.data[i] = static_cast<float>((vals[i] - mid) * scale);
    } else {
      out.missing[i] = 1;
    }
  }
  return out;
}

}  // namespace

NormalizedMap normalize(const HeightMap& z, float range_cap) {
  if (!(range_cap > 0.0f)) throw Error("range_cap must be > 0");
  float z_min = std::numeric_limits<float>::max();
  float z_max = 0.0f;
  bool any = false;
  for (float v : z.values()) {
    if (v > 0.0f) {
      any = true;
      z_min = std::min(z_min, v);
      z_max = std::max(z_max, v);
    }
  }
  if (!any) throw NoRoofData("normalize: height map has no nonzero pixel");

  NormParams params;
  params.z_min = z_min;
  params.z_max = z_max;
  params.range_cap = range_cap;
  const float span = z_max - z_min;
  params.extra_scale = span > range_cap ? range_cap / span : 1.0f;
  return apply(z, params);
}

NormalizedMap normalize_with(const HeightMap& z, const NormParams& params) {
  if (!(params.range_cap > 0.0f)) throw Error("range_cap must be > 0");
  return apply(z, params);
}

float denormalize_value(float x, const NormParams& params) {
  const double mid = 0.5 * (static_cast<double>(params.z_min) + params.z_max);
  return static_cast<float>(mid + static_cast<double>(x) * params.range_cap /
                                      (2.0 * params.extra_scale));
}

HeightMap denormalize(const NormalizedMap& x) {
  HeightMap z(x.width, x.height, x.pixel_size);
  auto out = z.values();
  for (size_t i = 0; i < x.data.size(); ++i) {
    out[i] = x.missing[i] ? 0.0f : denormalize_value(x.data[i], x.params);
  }
  return z;
}

}  // namespace roofkit
