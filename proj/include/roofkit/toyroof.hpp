#pragma once

#include "roofkit/mesh.hpp"
#include "roofkit/raster.hpp"
#include "roofkit/rng.hpp"

namespace roofkit {

// Procedural roof archetypes used for desk-scale datasets and fixtures.
enum class RoofArchetype { flat, shed, gable, hip, gable_dormer };

struct RoofSpec {
  RoofArchetype archetype = RoofArchetype::gable;
  double width_m = 10.0;   // extent along local x
  double depth_m = 8.0;    // extent along local y
  double eave_m = 3.0;     // roof height at the outer edge
  double ridge_m = 5.0;    // highest line/point of the roof
  double rotation_deg = 0.0;

  void validate() const;  // positive extents, ridge >= eave >= 0
};

struct ToyRoof {
  TriangleMesh mesh;
  HeightMap height;
  Footprint footprint;
};

// Builds the roof mesh centered on the grid, rasterizes it and infers the
// footprint from the nonzero pixels.
ToyRoof gen_toy_roof(const RoofSpec& spec, int grid_w, int grid_h, float pixel_size);

// Random spec with extents that keep the rotated building inside a grid of
// the given physical size.
RoofSpec random_roof_spec(Rng& rng, double grid_extent_m);

const char* archetype_name(RoofArchetype a);

}  // namespace roofkit
