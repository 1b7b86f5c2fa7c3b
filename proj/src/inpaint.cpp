#include "roofkit/inpaint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "roofkit/errors.hpp"

namespace roofkit {

namespace {

struct KnownPoint {
  double x, y, z;
  uint32_t index;  // row-major pixel index, used for tie-breaking
};

std::vector<KnownPoint> collect_known(const HeightMap& z) {
  std::vector<KnownPoint> known;
  for (int y = 0; y < z.height(); ++y) {
    for (int x = 0; x < z.width(); ++x) {
      const float v = z.at(x, y);
      if (v > 0.0f)
        known.push_back({static_cast<double>(x), static_cast<double>(y), v,
                         static_cast<uint32_t>(y) * z.width() + static_cast<uint32_t>(x)});
    }
  }
  return known;
}

bool fill_target(const HeightMap& z, const Footprint& m, int x, int y) {
  return m.at(x, y) && z.at(x, y) <= 0.0f;
}

float nearest_value(const std::vector<KnownPoint>& known, int x, int y) {
  double best = std::numeric_limits<double>::max();
  float value = 0.0f;
  for (const auto& p : known) {
    const double dx = p.x - x, dy = p.y - y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best) {
      best = d2;
      value = static_cast<float>(p.z);
    }
  }
  return value;
}

// ---- Delaunay triangulation (Bowyer-Watson) -------------------------------

struct Vec2 {
  double x, y;
};

struct Tri {
  int a, b, c;
};

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

bool in_circumcircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
  const double ax = a.x - p.x, ay = a.y - p.y;
  const double bx = b.x - p.x, by = b.y - p.y;
  const double cx = c.x - p.x, cy = c.y - p.y;
  const double det = (ax * ax + ay * ay) * (bx * cy - cx * by) -
                     (bx * bx + by * by) * (ax * cy - cx * ay) +
                     (cx * cx + cy * cy) * (ax * by - bx * ay);
  return det > 1e-9;  // strictly inside; cocircular grid quads stay put
}

std::vector<Tri> delaunay(const std::vector<Vec2>& pts) {
  // Three synthetic vertices enclosing everything, appended after the input.
  double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
  for (const auto& p : pts) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double span = std::max({max_x - min_x, max_y - min_y, 1.0});
  const double cx = 0.5 * (min_x + max_x), cy = 0.5 * (min_y + max_y);
  std::vector<Vec2> v = pts;
  const int s0 = static_cast<int>(v.size());
  v.push_back({cx - 20.0 * span, cy - 10.0 * span});
  v.push_back({cx + 20.0 * span, cy - 10.0 * span});
  v.push_back({cx, cy + 20.0 * span});

  std::vector<Tri> tris{{s0, s0 + 1, s0 + 2}};
  std::vector<Tri> next;
  std::vector<std::pair<int, int>> edges;
  for (int pi = 0; pi < s0; ++pi) {
    edges.clear();
    next.clear();
    for (const Tri& t : tris) {
      if (in_circumcircle(v[t.a], v[t.b], v[t.c], v[pi])) {
        edges.emplace_back(t.a, t.b);
        edges.emplace_back(t.b, t.c);
        edges.emplace_back(t.c, t.a);
      } else {
        next.push_back(t);
      }
    }
    // Cavity boundary = edges that appear exactly once (ignoring direction).
    for (size_t i = 0; i < edges.size(); ++i) {
      bool shared = false;
      for (size_t j = 0; j < edges.size(); ++j) {
        if (i == j) continue;
        if ((edges[i].first == edges[j].second && edges[i].second == edges[j].first) ||
            (edges[i].first == edges[j].first && edges[i].second == edges[j].second)) {
          shared = true;
          break;
        }
      }
      if (!shared) {
        Tri t{edges[i].first, edges[i].second, pi};
        if (orient(v[t.a], v[t.b], v[t.c]) < 0) std::swap(t.b, t.c);
        next.push_back(t);
      }
    }
    tris.swap(next);
  }

  std::vector<Tri> interior;
  for (const Tri& t : tris)
    if (t.a < s0 && t.b < s0 && t.c < s0) interior.push_back(t);
  return interior;
}

bool all_collinear(const std::vector<KnownPoint>& known) {
  if (known.size() < 3) return true;
  const auto& a = known[0];
  for (size_t i = 1; i + 1 < known.size(); ++i) {
    const double cross = (known[i].x - a.x) * (known[i + 1].y - a.y) -
                         (known[i].y - a.y) * (known[i + 1].x - a.x);
    if (std::abs(cross) > 1e-9) return false;
  }
  return true;
}

}  // namespace

InpaintMethod inpaint_method_from_string(std::string_view name) {
  if (name == "nearest") return InpaintMethod::nearest;
  if (name == "linear") return InpaintMethod::linear;
  if (name == "spline") return InpaintMethod::spline;
  if (name == "idw") return InpaintMethod::idw;
  if (name == "pmdiff" || name == "pm" || name == "pm_diffusion")
    return InpaintMethod::pm_diffusion;
  throw ConfigError("unknown inpaint method: " + std::string(name));
}

HeightMap inpaint_nearest(const HeightMap& z, const Footprint& m) {
  const auto known = collect_known(z);
  if (known.empty()) throw NoData("inpaint: no known pixel");
  HeightMap out = z;
  for (int y = 0; y < z.height(); ++y)
    for (int x = 0; x < z.width(); ++x)
      if (fill_target(z, m, x, y)) out.at(x, y) = nearest_value(known, x, y);
  return out;
}

HeightMap inpaint_linear(const HeightMap& z, const Footprint& m) {
  const auto known = collect_known(z);
  if (known.empty()) throw NoData("inpaint: no known pixel");
  if (all_collinear(known)) {
    std::fprintf(stderr, "inpaint_linear: known pixels are collinear, using nearest\n");
    return inpaint_nearest(z, m);
  }

  std::vector<Vec2> pts(known.size());
  for (size_t i = 0; i < known.size(); ++i) pts[i] = {known[i].x, known[i].y};
  const auto tris = delaunay(pts);

  HeightMap out = z;
  auto interpolate = [&](size_t ti, double px, double py, float* value) {
    const Tri& t = tris[ti];
    const Vec2 &a = pts[t.a], &b = pts[t.b], &c = pts[t.c];
    const double area = orient(a, b, c);
    const double w0 = ((b.x - px) * (c.y - py) - (b.y - py) * (c.x - px)) / area;
    const double w1 = ((c.x - px) * (a.y - py) - (c.y - py) * (a.x - px)) / area;
    const double w2 = 1.0 - w0 - w1;
    constexpr double kEps = -1e-9;
    if (w0 < kEps || w1 < kEps || w2 < kEps) return false;
    *value = static_cast<float>(w0 * known[t.a].z + w1 * known[t.b].z + w2 * known[t.c].z);
    return true;
  };

  size_t last_hit = 0;  // queries walk row-major, so the previous triangle usually matches
  for (int y = 0; y < z.height(); ++y) {
    for (int x = 0; x < z.width(); ++x) {
      if (!fill_target(z, m, x, y)) continue;
      float value = 0.0f;
      bool found = interpolate(last_hit, x, y, &value);
      for (size_t ti = 0; ti < tris.size() && !found; ++ti) {
        if (ti == last_hit) continue;
        if (interpolate(ti, x, y, &value)) {
          last_hit = ti;
          found = true;
        }
      }
      out.at(x, y) = found ? value : nearest_value(known, x, y);
    }
  }
  return out;
}

namespace {

// Keys cubic-convolution kernel, a = -0.5.
double keys(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

}  // namespace

HeightMap inpaint_spline(const HeightMap& z, const Footprint& m) {
  const HeightMap dense = inpaint_linear(z, m);

  // Stride-2 sample grid over a full-surface linear fill; missing pixels
  // outside the footprint get nearest values so the coarse grid has no holes.
  const int cw = (z.width() + 1) / 2;
  const int ch = (z.height() + 1) / 2;
  if (cw < 2 || ch < 2) return dense;
  const auto known = collect_known(z);
  // Two-sample border pad with linear extrapolation, so the kernel keeps
  // reproducing degree-1 fields at the image edges.
  constexpr int kPad = 2;
  const int pw = cw + 2 * kPad, ph = ch + 2 * kPad;
  std::vector<double> coarse(static_cast<size_t>(pw) * ph);
  auto cell = [&](int cx, int cy) -> double& {
    return coarse[static_cast<size_t>(cy + kPad) * pw + (cx + kPad)];
  };
  for (int cy = 0; cy < ch; ++cy) {
    for (int cx = 0; cx < cw; ++cx) {
      const int x = 2 * cx, y = 2 * cy;
      float v = dense.at(x, y);
      if (v <= 0.0f && !m.at(x, y)) v = nearest_value(known, x, y);
      cell(cx, cy) = v;
    }
  }
  for (int cy = 0; cy < ch; ++cy) {
    for (int p = 1; p <= kPad; ++p) {
      cell(-p, cy) = cell(0, cy) + p * (cell(0, cy) - cell(1, cy));
      cell(cw - 1 + p, cy) = cell(cw - 1, cy) + p * (cell(cw - 1, cy) - cell(cw - 2, cy));
    }
  }
  for (int cx = -kPad; cx < cw + kPad; ++cx) {
    for (int p = 1; p <= kPad; ++p) {
      cell(cx, -p) = cell(cx, 0) + p * (cell(cx, 0) - cell(cx, 1));
      cell(cx, ch - 1 + p) = cell(cx, ch - 1) + p * (cell(cx, ch - 1) - cell(cx, ch - 2));
    }
  }
  auto coarse_at = [&](int cx, int cy) { return cell(cx, cy); };

  HeightMap out = z;
  for (int y = 0; y < z.height(); ++y) {
    for (int x = 0; x < z.width(); ++x) {
      if (!fill_target(z, m, x, y)) continue;
      const double u = x * 0.5, v = y * 0.5;
      const int iu = static_cast<int>(std::floor(u));
      const int iv = static_cast<int>(std::floor(v));
      double acc = 0.0;
      for (int n = -1; n <= 2; ++n) {
        const double wy = keys(v - (iv + n));
        if (wy == 0.0) continue;
        for (int k = -1; k <= 2; ++k) {
          const double wx = keys(u - (iu + k));
          if (wx == 0.0) continue;
          acc += wx * wy * coarse_at(iu + k, iv + n);
        }
      }
      out.at(x, y) = static_cast<float>(acc);
    }
  }
  return out;
}

HeightMap inpaint_idw(const HeightMap& z, const Footprint& m, double power, int neighbors) {
  const auto known = collect_known(z);
  if (known.empty()) throw NoData("inpaint: no known pixel");
  const size_t k = std::min<size_t>(std::max(neighbors, 1), known.size());

  HeightMap out = z;
  std::vector<std::pair<double, uint32_t>> dist(known.size());
  for (int y = 0; y < z.height(); ++y) {
    for (int x = 0; x < z.width(); ++x) {
      if (!fill_target(z, m, x, y)) continue;
      for (size_t i = 0; i < known.size(); ++i) {
        const double dx = known[i].x - x, dy = known[i].y - y;
        dist[i] = {dx * dx + dy * dy, static_cast<uint32_t>(i)};
      }
      std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
      std::sort(dist.begin(), dist.begin() + k);

      double wsum = 0.0, acc = 0.0;
      bool exact = false;
      for (size_t i = 0; i < k; ++i) {
        const auto& p = known[dist[i].second];
        if (dist[i].first == 0.0) {
          out.at(x, y) = static_cast<float>(p.z);
          exact = true;
          break;
        }
        const double w = std::pow(dist[i].first, -0.5 * power);
        wsum += w;
        acc += w * p.z;
      }
      if (!exact) out.at(x, y) = static_cast<float>(acc / wsum);
    }
  }
  return out;
}

HeightMap inpaint_pm_diffusion(const HeightMap& z, const Footprint& m, double K,
                               int iterations, double dt, PmTrace* trace) {
  if (dt > 0.25) throw ConfigError("pm diffusion requires dt <= 0.25");
  const auto known = collect_known(z);
  if (known.empty()) throw NoData("inpaint: no known pixel");

  // Work in [0, 1] relative to the known range so K is scale-free.
  double z_lo = known[0].z, z_hi = known[0].z;
  for (const auto& p : known) {
    z_lo = std::min(z_lo, p.z);
    z_hi = std::max(z_hi, p.z);
  }
  const double span = std::max(z_hi - z_lo, 1e-12);
  const int W = z.width(), H = z.height();

  // Missing pixels start from a nearest fill; starting at a global constant
  // would put large artificial gradients everywhere, which the conductance
  // then refuses to diffuse across.
  std::vector<double> u(static_cast<size_t>(W) * H);
  std::vector<uint8_t> is_known(u.size(), 0);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const size_t i = static_cast<size_t>(y) * W + x;
      if (z.at(x, y) > 0.0f) {
        u[i] = (z.at(x, y) - z_lo) / span;
        is_known[i] = 1;
      } else {
        u[i] = (nearest_value(known, x, y) - z_lo) / span;
      }
    }
  }

  std::vector<double> next = u;
  const double inv_k2 = 1.0 / (K * K);
  for (int iter = 0; iter < iterations; ++iter) {
    double max_update = 0.0;
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        const size_t i = static_cast<size_t>(y) * W + x;
        if (is_known[i]) continue;
        double flux = 0.0;
        auto edge = [&](int nx, int ny) {
          if (nx < 0 || nx >= W || ny < 0 || ny >= H) return;  // Neumann border
          const double d = u[static_cast<size_t>(ny) * W + nx] - u[i];
          flux += std::exp(-d * d * inv_k2) * d;
        };
        edge(x - 1, y);
        edge(x + 1, y);
        edge(x, y - 1);
        edge(x, y + 1);
        const double step = dt * flux;
        next[i] = u[i] + step;
        max_update = std::max(max_update, std::abs(step));
      }
    }
    u.swap(next);
    if (trace) {
      double lo = u[0], hi = u[0];
      for (double v : u) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      trace->bounds.emplace_back(static_cast<float>(lo * span + z_lo),
                                 static_cast<float>(hi * span + z_lo));
    }
    if (max_update < 1e-5) break;
  }

  HeightMap out = z;
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      if (fill_target(z, m, x, y))
        out.at(x, y) = static_cast<float>(u[static_cast<size_t>(y) * W + x] * span + z_lo);
    }
  }
  return out;
}

HeightMap inpaint(const HeightMap& z, const Footprint& m, InpaintMethod method,
                  const InpaintParams& params) {
  switch (method) {
    case InpaintMethod::nearest:
      return inpaint_nearest(z, m);
    case InpaintMethod::linear:
      return inpaint_linear(z, m);
    case InpaintMethod::spline:
      return inpaint_spline(z, m);
    case InpaintMethod::idw:
      return inpaint_idw(z, m, params.idw_power, params.idw_neighbors);
    case InpaintMethod::pm_diffusion:
      return inpaint_pm_diffusion(z, m, params.pm_k, params.pm_iterations, params.pm_dt);
  }
  throw ConfigError("unknown inpaint method");
}

}  // namespace roofkit
