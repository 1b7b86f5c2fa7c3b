#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "roofkit/errors.hpp"
#include "roofkit/inpaint.hpp"
#include "roofkit/rng.hpp"

using namespace roofkit;

namespace {

HeightMap zeros(int w, int h) { return HeightMap(w, h, 1.0f); }

Footprint full(int w, int h) { return Footprint(w, h, 1); }

// Reference nearest: scan all known pixels, strict-less keeps the first
// (smallest row-major index) on ties.
float brute_nearest(const HeightMap& z, int qx, int qy) {
  double best = std::numeric_limits<double>::max();
  float value = 0.0f;
  for (int y = 0; y < z.height(); ++y) {
    for (int x = 0; x < z.width(); ++x) {
      if (z.at(x, y) <= 0.0f) continue;
      const double d2 = (x - qx) * double(x - qx) + (y - qy) * double(y - qy);
      if (d2 < best) {
        best = d2;
        value = z.at(x, y);
      }
    }
  }
  return value;
}

}  // namespace

TEST_CASE("nearest fills the whole footprint from a single known pixel") {
  HeightMap z = zeros(6, 6);
  z.at(2, 3) = 4.0f;
  const HeightMap out = inpaint_nearest(z, full(6, 6));
  for (float v : out.values()) CHECK(v == 4.0f);
}

TEST_CASE("nearest leaves known pixels untouched and matches brute force") {
  HeightMap z = zeros(5, 5);
  z.at(0, 0) = 1.0f;
  z.at(4, 1) = 2.0f;
  z.at(2, 4) = 7.0f;
  z.at(3, 2) = 5.0f;
  const HeightMap out = inpaint_nearest(z, full(5, 5));
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 5; ++x) {
      if (z.at(x, y) > 0.0f)
        CHECK(out.at(x, y) == z.at(x, y));
      else
        CHECK(out.at(x, y) == brute_nearest(z, x, y));
    }
  }
}

TEST_CASE("nearest requires data") {
  const HeightMap z = zeros(4, 4);
  CHECK_THROWS_AS(inpaint_nearest(z, full(4, 4)), NoData);
}

TEST_CASE("linear reproduces a sampled plane exactly in the interior") {
  const int n = 12;
  HeightMap z = zeros(n, n);
  Rng rng(21);
  auto plane = [](int x, int y) { return 1.0 + 0.5 * x + 0.25 * y; };
  // corners pin the hull; sprinkle interior samples
  z.at(0, 0) = static_cast<float>(plane(0, 0));
  z.at(n - 1, 0) = static_cast<float>(plane(n - 1, 0));
  z.at(0, n - 1) = static_cast<float>(plane(0, n - 1));
  z.at(n - 1, n - 1) = static_cast<float>(plane(n - 1, n - 1));
  for (int k = 0; k < 20; ++k) {
    const int x = static_cast<int>(rng.uniform_int(0, n - 1));
    const int y = static_cast<int>(rng.uniform_int(0, n - 1));
    z.at(x, y) = static_cast<float>(plane(x, y));
  }
  const HeightMap out = inpaint_linear(z, full(n, n));
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) CHECK(std::abs(out.at(x, y) - plane(x, y)) < 1e-5);
}

TEST_CASE("linear on constant data fills the constant") {
  HeightMap z = zeros(8, 8);
  z.at(1, 1) = 2.0f;
  z.at(6, 2) = 2.0f;
  z.at(3, 6) = 2.0f;
  z.at(5, 5) = 2.0f;
  const HeightMap out = inpaint_linear(z, full(8, 8));
  for (float v : out.values()) CHECK(v == doctest::Approx(2.0));
}

TEST_CASE("linear falls back to nearest outside the hull and when collinear") {
  HeightMap z = zeros(9, 9);
  z.at(3, 3) = 2.0f;
  z.at(5, 3) = 4.0f;
  z.at(4, 5) = 3.0f;
  const HeightMap out = inpaint_linear(z, full(9, 9));
  // (0, 8) is far outside the triangle hull
  CHECK(out.at(0, 8) == brute_nearest(z, 0, 8));

  HeightMap collinear = zeros(7, 7);
  collinear.at(1, 1) = 1.0f;
  collinear.at(3, 3) = 2.0f;
  collinear.at(5, 5) = 3.0f;
  const HeightMap fb = inpaint_linear(collinear, full(7, 7));
  const HeightMap nn = inpaint_nearest(collinear, full(7, 7));
  CHECK(std::equal(fb.values().begin(), fb.values().end(), nn.values().begin()));
}

TEST_CASE("spline keeps constants, degree-1 ramps and known samples") {
  SUBCASE("constant field") {
    HeightMap z = zeros(10, 10);
    z.at(1, 1) = 3.0f;
    z.at(8, 1) = 3.0f;
    z.at(1, 8) = 3.0f;
    z.at(8, 8) = 3.0f;
    const HeightMap out = inpaint_spline(z, full(10, 10));
    for (float v : out.values()) CHECK(v == doctest::Approx(3.0).epsilon(1e-6));
  }
  SUBCASE("linear ramp") {
    const int n = 12;
    HeightMap z = zeros(n, n);
    auto ramp = [](int x, int y) { return 2.0 + 0.3 * x + 0.2 * y; };
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x)
        if ((x + y) % 3 == 0) z.at(x, y) = static_cast<float>(ramp(x, y));
    // pin the corners so every query is interior to the sample hull
    for (int y : {0, n - 1})
      for (int x : {0, n - 1}) z.at(x, y) = static_cast<float>(ramp(x, y));
    const HeightMap out = inpaint_spline(z, full(n, n));
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x)
        CHECK(std::abs(out.at(x, y) - ramp(x, y)) < 1e-5);
  }
  SUBCASE("known pixels pass through unchanged") {
    HeightMap z = zeros(8, 8);
    z.at(2, 2) = 1.5f;
    z.at(5, 3) = 4.5f;
    z.at(3, 6) = 2.5f;
    z.at(6, 6) = 3.5f;
    const HeightMap out = inpaint_spline(z, full(8, 8));
    CHECK(out.at(2, 2) == 1.5f);
    CHECK(out.at(5, 3) == 4.5f);
    CHECK(out.at(3, 6) == 2.5f);
    CHECK(out.at(6, 6) == 3.5f);
  }
}

TEST_CASE("idw closed forms and brute-force agreement") {
  SUBCASE("two equidistant samples average under p = 2") {
    // zero marks missing, so the low sample is 2 m rather than 0 m
    HeightMap z = zeros(7, 3);
    z.at(1, 1) = 10.0f;
    z.at(5, 1) = 2.0f;
    const HeightMap out = inpaint_idw(z, full(7, 3), 2.0, 8);
    CHECK(out.at(3, 1) == doctest::Approx(6.0));  // midpoint of 10 and 2
  }
  SUBCASE("a coincident sample returns its own value") {
    HeightMap z = zeros(5, 5);
    z.at(2, 2) = 7.0f;
    z.at(0, 0) = 1.0f;
    const HeightMap out = inpaint_idw(z, full(5, 5), 2.0, 8);
    CHECK(out.at(2, 2) == 7.0f);
  }
  SUBCASE("6x6 fixture matches the all-pairs formula") {
    const int n = 6;
    HeightMap z = zeros(n, n);
    Rng rng(31);
    std::vector<std::array<double, 3>> known;
    for (int k = 0; k < 9; ++k) {
      const int x = static_cast<int>(rng.uniform_int(0, n - 1));
      const int y = static_cast<int>(rng.uniform_int(0, n - 1));
      const double v = rng.uniform(1.0, 9.0);
      z.at(x, y) = static_cast<float>(v);
    }
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x)
        if (z.at(x, y) > 0.0f) known.push_back({double(x), double(y), z.at(x, y)});

    const HeightMap out = inpaint_idw(z, full(n, n), 2.0, 64);  // k >= known size
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        if (z.at(x, y) > 0.0f) continue;
        double wsum = 0.0, acc = 0.0;
        for (const auto& p : known) {
          const double d2 = (p[0] - x) * (p[0] - x) + (p[1] - y) * (p[1] - y);
          const double w = 1.0 / d2;  // d^-2
          wsum += w;
          acc += w * p[2];
        }
        CHECK(out.at(x, y) == doctest::Approx(acc / wsum).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("pm diffusion converges to the boundary constant and stays stable") {
  const int n = 16;
  HeightMap z = zeros(n, n);
  Footprint m = full(n, n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (x == 0 || y == 0 || x == n - 1 || y == n - 1) z.at(x, y) = 5.0f;
    }
  }
  PmTrace trace;
  const HeightMap out = inpaint_pm_diffusion(z, m, 0.3, 4000, 0.2, &trace);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) CHECK(std::abs(out.at(x, y) - 5.0f) < 1e-4f);

  // known pixels bit-identical
  for (int x = 0; x < n; ++x) CHECK(out.at(x, 0) == z.at(x, 0));

  // discrete maximum principle: evolving values never leave the data range
  for (const auto& [lo, hi] : trace.bounds) {
    CHECK(lo >= 0.0f - 1e-6f);
    CHECK(hi <= 5.0f + 1e-6f);
  }
}

TEST_CASE("pm diffusion preserves a step edge better than linear diffusion") {
  const int n = 24;
  HeightMap z = zeros(n, n);
  Footprint m = full(n, n);
  // two plateaus with a missing band in the middle
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (x < 9) z.at(x, y) = 2.0f;
      if (x >= 15) z.at(x, y) = 8.0f;
    }
  }
  // seed the band with a hard edge to measure its blurring
  for (int y = 0; y < n; ++y) {
    for (int x = 9; x < 15; ++x) z.at(x, y) = x < 12 ? 2.0f : 8.0f;
  }

  auto edge_gradient = [&](const HeightMap& u) {
    double g = 0.0;
    for (int y = 0; y < n; ++y) g += std::abs(u.at(12, y) - u.at(11, y));
    return g / n;
  };
  HeightMap holes = z;
  for (int y = 2; y < n - 2; ++y)
    for (int x = 10; x < 14; ++x) holes.at(x, y) = 0.0f;

  const HeightMap pm = inpaint_pm_diffusion(holes, m, 0.15, 300, 0.2);
  const HeightMap heat = inpaint_pm_diffusion(holes, m, 1e9, 300, 0.2);  // g ~ 1
  CHECK(edge_gradient(pm) / edge_gradient(heat) > 1.0);
}

TEST_CASE("the dispatcher fills every footprint pixel for all methods") {
  const int n = 14;
  HeightMap z = zeros(n, n);
  Rng rng(12);
  for (int k = 0; k < 30; ++k)
    z.at(static_cast<int>(rng.uniform_int(0, n - 1)),
         static_cast<int>(rng.uniform_int(0, n - 1))) = static_cast<float>(rng.uniform(2, 6));
  Footprint m(n, n);
  for (int y = 2; y < n - 2; ++y)
    for (int x = 2; x < n - 2; ++x) m.at(x, y) = 1;

  for (auto method : {InpaintMethod::nearest, InpaintMethod::linear, InpaintMethod::spline,
                      InpaintMethod::idw, InpaintMethod::pm_diffusion}) {
    const HeightMap out = inpaint(z, m, method);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        if (m.at(x, y)) CHECK(out.at(x, y) > 0.0f);
        if (z.at(x, y) > 0.0f) CHECK(out.at(x, y) == z.at(x, y));
      }
    }
  }

  CHECK(inpaint_method_from_string("pmdiff") == InpaintMethod::pm_diffusion);
  CHECK_THROWS_AS(inpaint_method_from_string("kriging"), ConfigError);
}

TEST_CASE("pm diffusion rejects unstable time steps") {
  HeightMap z = zeros(4, 4);
  z.at(1, 1) = 2.0f;
  CHECK_THROWS_AS(inpaint_pm_diffusion(z, full(4, 4), 0.3, 10, 0.3), ConfigError);
}
