#pragma once

#include <filesystem>
#include <optional>

#include "roofkit/normalize.hpp"
#include "roofkit/raster.hpp"

namespace roofkit {

// RHM container: magic "RHM1", width u32 LE, height u32 LE, pixel_size f32 LE,
// then width*height f32 LE values, row-major. Heights are meters; footprints
// reuse the container with values in {0, 1}; normalized planes are dumped
// through the same writer for trajectory snapshots.

void write_rhm(const std::filesystem::path& path, const HeightMap& map);
HeightMap read_rhm(const std::filesystem::path& path);

void write_rhm_plane(const std::filesystem::path& path, const Plane& plane, float pixel_size);

void write_footprint(const std::filesystem::path& path, const Footprint& fp, float pixel_size);
Footprint read_footprint(const std::filesystem::path& path);

// Per-map JSON sidecar recording the normalization and geolocation.
struct Sidecar {
  NormParams params;
  double lon = 0.0;
  double lat = 0.0;
};

void write_sidecar(const std::filesystem::path& path, const Sidecar& sc);
Sidecar read_sidecar(const std::filesystem::path& path);

// Lossy 16-bit grayscale export (binary PGM), value = z / range_cap * 65535
// clamped. Visualization only.
void write_pgm16(const std::filesystem::path& path, const HeightMap& map, float range_cap = 10.0f);

}  // namespace roofkit
