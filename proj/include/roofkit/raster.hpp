#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace roofkit {

// Single-channel raster of building heights in meters.
// Zero marks a pixel that is either missing or at ground level.
class HeightMap {
 public:
  HeightMap() = default;
  HeightMap(int width, int height, float pixel_size, float fill = 0.0f);

  int width() const { return width_; }
  int height() const { return height_; }
  float pixel_size() const { return pixel_size_; }

  float at(int x, int y) const { return data_[static_cast<size_t>(y) * width_ + x]; }
  float& at(int x, int y) { return data_[static_cast<size_t>(y) * width_ + x]; }

  std::span<const float> values() const { return data_; }
  std::span<float> values() { return data_; }

  size_t size() const { return data_.size(); }
  int nonzero_count() const;

  // Throws Error if any value is non-finite or negative.
  void validate() const;

 private:
  int width_ = 0;
  int height_ = 0;
  float pixel_size_ = 1.0f;
  std::vector<float> data_;
};

// Binary roof mask. 1 = roof pixel, 0 = outside.
struct Footprint {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> mask;

  Footprint() = default;
  Footprint(int w, int h, uint8_t fill = 0)
      : width(w), height(h), mask(static_cast<size_t>(w) * h, fill) {}

  uint8_t at(int x, int y) const { return mask[static_cast<size_t>(y) * width + x]; }
  uint8_t& at(int x, int y) { return mask[static_cast<size_t>(y) * width + x]; }

  int popcount() const;
  bool same_shape(const HeightMap& z) const {
    return width == z.width() && height == z.height();
  }
};

// Unconstrained float grid used for normalized-space work.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<float> v;

  Plane() = default;
  Plane(int w, int h, float fill = 0.0f)
      : width(w), height(h), v(static_cast<size_t>(w) * h, fill) {}

  float at(int x, int y) const { return v[static_cast<size_t>(y) * width + x]; }
  float& at(int x, int y) { return v[static_cast<size_t>(y) * width + x]; }
  size_t size() const { return v.size(); }
};

// Mask of the pixels with a height measurement: 1 exactly where z > 0.
Footprint infer_footprint(const HeightMap& z);

}  // namespace roofkit
