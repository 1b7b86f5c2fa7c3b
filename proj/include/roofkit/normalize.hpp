#pragma once

#include <cstdint>
#include <vector>

#include "roofkit/raster.hpp"

namespace roofkit {

// Parameters that recover meters from normalized values.
// z_min/z_max are the extremes of the nonzero input heights; extra_scale < 1
// records the rescale applied when z_max - z_min exceeded range_cap.
struct NormParams {
  float z_min = 0.0f;
  float z_max = 0.0f;
  float range_cap = 10.0f;
  float extra_scale = 1.0f;
};

// Height map mapped into [-1, 1] about the midpoint of its nonzero range.
// Pixels that carried no measurement are flagged in `missing` and hold 0.
struct NormalizedMap {
  int width = 0;
  int height = 0;
  float pixel_size = 1.0f;
  std::vector<float> data;
  std::vector<uint8_t> missing;
  NormParams params;

  float at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
  bool is_missing(int x, int y) const {
    return missing[static_cast<size_t>(y) * width + x] != 0;
  }
  Plane plane() const;  // data as a bare grid (missing pixels are 0)
};

// Maps nonzero heights to x = (2/cap) * e * (z - (z_min + z_max)/2), where the
// rescale factor e = cap / (z_max - z_min) kicks in only when the span exceeds
// range_cap. Zero pixels become missing markers and skip the formula.
// Throws NoRoofData when no pixel is nonzero.
NormalizedMap normalize(const HeightMap& z, float range_cap = 10.0f);

// Same mapping but with the parameters fixed by the caller, e.g. to express a
// ground-truth map in the coordinate system of its corrupted counterpart.
NormalizedMap normalize_with(const HeightMap& z, const NormParams& params);

// Inverse of normalize. Missing pixels come back as 0 m; nonzero heights are
// recovered to within 1e-5 m.
HeightMap denormalize(const NormalizedMap& x);

// Meter value for one normalized sample under `params`.
float denormalize_value(float x, const NormParams& params);

}  // namespace roofkit
