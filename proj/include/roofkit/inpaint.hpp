#pragma once

#include <string_view>
#include <vector>

#include "roofkit/raster.hpp"

namespace roofkit {

// Classical references for filling missing (zero) pixels inside the
// footprint. All methods leave known pixels untouched, fill every missing
// footprint pixel, and keep zero outside the footprint where no measurement
// exists. Known pixels outside the footprint still contribute as data.

enum class InpaintMethod { nearest, linear, spline, idw, pm_diffusion };

struct InpaintParams {
  double idw_power = 2.0;
  int idw_neighbors = 16;
  double pm_k = 0.3;        // conductance scale, relative to the known range
  int pm_iterations = 500;
  double pm_dt = 0.2;       // must be <= 0.25 for 4-neighbor stability
};

InpaintMethod inpaint_method_from_string(std::string_view name);

// Value of the Euclidean-nearest known pixel; ties resolved toward the
// smaller row-major index.
HeightMap inpaint_nearest(const HeightMap& z, const Footprint& m);

// Barycentric interpolation over the Delaunay triangulation of the known
// pixels; outside the convex hull (or when the known set is degenerate)
// falls back to nearest.
HeightMap inpaint_linear(const HeightMap& z, const Footprint& m);

// Cubic-convolution resampling (Keys kernel, a = -0.5) of a stride-2 grid
// taken from a linear pre-fill.
HeightMap inpaint_spline(const HeightMap& z, const Footprint& m);

// Shepard weights d^-power over the `neighbors` nearest known pixels;
// a query coincident with a known pixel returns that value.
HeightMap inpaint_idw(const HeightMap& z, const Footprint& m, double power = 2.0,
                      int neighbors = 16);

// Min/max of the evolving field per iteration, for stability audits.
struct PmTrace {
  std::vector<std::pair<float, float>> bounds;
};

// Edge-preserving diffusion u += dt * div(g(|du|) du), g(s) = exp(-(s/K)^2),
// evolving only missing pixels; known pixels are re-imposed every iteration.
// Stops early when the largest update falls below 1e-5 (relative units).
HeightMap inpaint_pm_diffusion(const HeightMap& z, const Footprint& m, double K = 0.3,
                               int iterations = 500, double dt = 0.2,
                               PmTrace* trace = nullptr);

HeightMap inpaint(const HeightMap& z, const Footprint& m, InpaintMethod method,
                  const InpaintParams& params = {});

}  // namespace roofkit
