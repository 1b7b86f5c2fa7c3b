#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "roofkit/raster.hpp"

namespace roofkit {

struct TriangleMesh {
  std::vector<std::array<double, 3>> vertices;  // x, y in meters; z = height
  std::vector<std::array<int, 3>> triangles;    // indices into vertices

  bool empty() const { return triangles.empty(); }
};

// Wavefront-style ASCII loader; only `v` and `f` records are honored.
// Faces may be polygons and are fan-triangulated. Indices are 1-based and may
// carry /vt/vn suffixes, which are ignored.
TriangleMesh load_obj(const std::filesystem::path& path);
void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh);

// Samples every triangle at the covered pixel centers and keeps the maximum
// interpolated height per pixel. Pixel (ix, iy) is centered at
// ((ix + 0.5) * pixel_size, (iy + 0.5) * pixel_size); uncovered pixels stay 0.
// Degenerate triangles (zero projected area) are skipped; if no triangle
// survives, throws EmptyMesh.
HeightMap rasterize(const TriangleMesh& mesh, float pixel_size, int width, int height);

}  // namespace roofkit
