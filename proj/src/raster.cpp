#include "roofkit/raster.hpp"

#include <cmath>

#include "roofkit/errors.hpp"

namespace roofkit {

HeightMap::HeightMap(int width, int height, float pixel_size, float fill)
    : width_(width), height_(height), pixel_size_(pixel_size) {
  if (width < 1 || height < 1) throw Error("HeightMap dimensions must be >= 1");
  if (!(pixel_size > 0.0f)) throw Error("HeightMap pixel_size must be > 0");
  data_.assign(static_cast<size_t>(width) * height, fill);
}

int HeightMap::nonzero_count() const {
  int n = 0;
  for (float z : data_)
    if (z > 0.0f) ++n;
  return n;
}

void HeightMap::validate() const {
  for (float z : data_) {
    if (!std::isfinite(z) || z < 0.0f) throw Error("HeightMap values must be finite and >= 0");
  }
}

int Footprint::popcount() const {
  int n = 0;
  for (uint8_t b : mask) n += b ? 1 : 0;
  return n;
}

Footprint infer_footprint(const HeightMap& z) {
  Footprint fp(z.width(), z.height());
  const auto vals = z.values();
  for (size_t i = 0; i < vals.size(); ++i) fp.mask[i] = vals[i] > 0.0f ? 1 : 0;
  return fp;
}

}  // namespace roofkit
