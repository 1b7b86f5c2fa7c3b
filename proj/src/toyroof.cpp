#include "roofkit/toyroof.hpp"

#include <cmath>
#include <numbers>

#include "roofkit/errors.hpp"

namespace roofkit {

void RoofSpec::validate() const {
  if (!(width_m > 0.0) || !(depth_m > 0.0)) throw ConfigError("roof extents must be positive");
  if (eave_m < 0.0 || ridge_m < eave_m) throw ConfigError("roof needs ridge >= eave >= 0");
}

namespace {

using V3 = std::array<double, 3>;

void add_quad(TriangleMesh& mesh, const V3& a, const V3& b, const V3& c, const V3& d) {
  const int base = static_cast<int>(mesh.vertices.size());
  mesh.vertices.insert(mesh.vertices.end(), {a, b, c, d});
  mesh.triangles.push_back({base, base + 1, base + 2});
  mesh.triangles.push_back({base, base + 2, base + 3});
}

void add_tri(TriangleMesh& mesh, const V3& a, const V3& b, const V3& c) {
  const int base = static_cast<int>(mesh.vertices.size());
  mesh.vertices.insert(mesh.vertices.end(), {a, b, c});
  mesh.triangles.push_back({base, base + 1, base + 2});
}

// Gable volume with its ridge along x, centered at (cx, cy).
void add_gable(TriangleMesh& mesh, double cx, double cy, double w, double d, double eave,
               double ridge) {
  const double hw = w / 2, hd = d / 2;
  add_quad(mesh, {cx - hw, cy - hd, eave}, {cx + hw, cy - hd, eave}, {cx + hw, cy, ridge},
           {cx - hw, cy, ridge});
  add_quad(mesh, {cx - hw, cy, ridge}, {cx + hw, cy, ridge}, {cx + hw, cy + hd, eave},
           {cx - hw, cy + hd, eave});
}

TriangleMesh build_mesh(const RoofSpec& spec) {
  TriangleMesh mesh;
  const double w = spec.width_m, d = spec.depth_m;
  const double hw = w / 2, hd = d / 2;
  const double e = spec.eave_m, r = spec.ridge_m;

  switch (spec.archetype) {
    case RoofArchetype::flat:
      add_quad(mesh, {-hw, -hd, r}, {hw, -hd, r}, {hw, hd, r}, {-hw, hd, r});
      break;
    case RoofArchetype::shed:
      add_quad(mesh, {-hw, -hd, e}, {hw, -hd, e}, {hw, hd, r}, {-hw, hd, r});
      break;
    case RoofArchetype::gable:
      add_gable(mesh, 0.0, 0.0, w, d, e, r);
      break;
    case RoofArchetype::hip: {
      // Ridge runs along the longer extent; equal extents give a pyramid.
      if (w >= d) {
        const double rh = (w - d) / 2;
        add_quad(mesh, {-hw, -hd, e}, {hw, -hd, e}, {rh, 0, r}, {-rh, 0, r});
        add_quad(mesh, {hw, hd, e}, {-hw, hd, e}, {-rh, 0, r}, {rh, 0, r});
        add_tri(mesh, {hw, -hd, e}, {hw, hd, e}, {rh, 0, r});
        add_tri(mesh, {-hw, hd, e}, {-hw, -hd, e}, {-rh, 0, r});
      } else {
        const double rh = (d - w) / 2;
        add_quad(mesh, {hw, -hd, e}, {hw, hd, e}, {0, rh, r}, {0, -rh, r});
        add_quad(mesh, {-hw, hd, e}, {-hw, -hd, e}, {0, -rh, r}, {0, rh, r});
        add_tri(mesh, {hw, hd, e}, {-hw, hd, e}, {0, rh, r});
        add_tri(mesh, {-hw, -hd, e}, {hw, -hd, e}, {0, -rh, r});
      }
      break;
    }
    case RoofArchetype::gable_dormer: {
      add_gable(mesh, 0.0, 0.0, w, d, e, r);
      // Small perpendicular gable poking out of the front slope.
      const double dw = w * 0.28, dd = d * 0.42;
      const double de = e + 0.35 * (r - e), dr = e + 0.85 * (r - e);
      const double cx = w * 0.15, cy = -hd + dd / 2;
      const double dhw = dw / 2, dhd = dd / 2;
      add_quad(mesh, {cx - dhw, cy - dhd, de}, {cx, cy - dhd, dr}, {cx, cy + dhd, dr},
               {cx - dhw, cy + dhd, de});
      add_quad(mesh, {cx, cy - dhd, dr}, {cx + dhw, cy - dhd, de}, {cx + dhw, cy + dhd, de},
               {cx, cy + dhd, dr});
      break;
    }
  }
  return mesh;
}

}  // namespace

ToyRoof gen_toy_roof(const RoofSpec& spec, int grid_w, int grid_h, float pixel_size) {
  spec.validate();
  TriangleMesh mesh = build_mesh(spec);

  const double theta = spec.rotation_deg * std::numbers::pi / 180.0;
  const double c = std::cos(theta), s = std::sin(theta);
  const double cx = grid_w * pixel_size * 0.5;
  const double cy = grid_h * pixel_size * 0.5;
  for (auto& v : mesh.vertices) {
    const double x = v[0], y = v[1];
    v[0] = c * x - s * y + cx;
    v[1] = s * x + c * y + cy;
  }

  ToyRoof roof;
  roof.height = rasterize(mesh, pixel_size, grid_w, grid_h);
  roof.footprint = infer_footprint(roof.height);
  roof.mesh = std::move(mesh);
  return roof;
}

RoofSpec random_roof_spec(Rng& rng, double grid_extent_m) {
  RoofSpec spec;
  spec.archetype = static_cast<RoofArchetype>(rng.uniform_int(0, 4));
  // Keep the rotated bounding diagonal inside the grid with some margin.
  const double max_diag = grid_extent_m * 0.9;
  double w = rng.uniform(0.45, 0.8) * grid_extent_m;
  double d = rng.uniform(0.45, 0.8) * grid_extent_m;
  const double diag = std::hypot(w, d);
  if (diag > max_diag) {
    w *= max_diag / diag;
    d *= max_diag / diag;
  }
  spec.width_m = w;
  spec.depth_m = d;
  spec.eave_m = rng.uniform(2.5, 4.5);
  spec.ridge_m = spec.eave_m + rng.uniform(0.8, 4.0);
  if (spec.archetype == RoofArchetype::flat) spec.ridge_m = spec.eave_m;
  spec.rotation_deg = rng.uniform(0.0, 360.0);
  return spec;
}

const char* archetype_name(RoofArchetype a) {
  switch (a) {
    case RoofArchetype::flat: return "flat";
    case RoofArchetype::shed: return "shed";
    case RoofArchetype::gable: return "gable";
    case RoofArchetype::hip: return "hip";
    case RoofArchetype::gable_dormer: return "gable_dormer";
  }
  return "unknown";
}

}  // namespace roofkit
