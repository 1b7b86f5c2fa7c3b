#include <doctest.h>

#include <cmath>

#include "roofkit/errors.hpp"
#include "roofkit/io.hpp"
#include "roofkit/normalize.hpp"
#include "roofkit/raster.hpp"
#include "roofkit/rng.hpp"

using namespace roofkit;

namespace {

HeightMap map_from(std::initializer_list<float> values, int w, int h) {
  HeightMap z(w, h, 1.0f);
  size_t i = 0;
  for (float v : values) z.values()[i++] = v;
  return z;
}

HeightMap random_map(Rng& rng, int w, int h, double lo, double hi, double missing_frac) {
  HeightMap z(w, h, 1.0f);
  for (auto& v : z.values()) {
    v = rng.uniform() < missing_frac ? 0.0f : static_cast<float>(rng.uniform(lo, hi));
  }
  if (z.nonzero_count() == 0) z.values()[0] = static_cast<float>(hi);
  return z;
}

}  // namespace

TEST_CASE("normalize maps the nonzero range symmetrically") {
  const HeightMap z = map_from({2.0f, 5.0f, 8.0f, 0.0f}, 2, 2);
  const NormalizedMap x = normalize(z, 10.0f);
  CHECK(x.data[0] == doctest::Approx(-0.6).epsilon(1e-6));
  CHECK(x.data[1] == doctest::Approx(0.0));
  CHECK(x.data[2] == doctest::Approx(0.6).epsilon(1e-6));
  CHECK(x.params.z_min == 2.0f);
  CHECK(x.params.z_max == 8.0f);
  CHECK(x.params.extra_scale == 1.0f);
  CHECK(x.missing[3] == 1);
  CHECK(x.data[3] == 0.0f);
}

TEST_CASE("a single-height map normalizes to zero") {
  const HeightMap z = map_from({0.0f, 7.0f}, 2, 1);
  const NormalizedMap x = normalize(z, 10.0f);
  CHECK(x.data[1] == 0.0f);
}

TEST_CASE("spans beyond the cap rescale and record the factor") {
  const HeightMap z = map_from({1.0f, 21.0f, 11.0f}, 3, 1);
  const NormalizedMap x = normalize(z, 10.0f);
  CHECK(x.params.extra_scale == doctest::Approx(0.5));
  CHECK(x.data[0] == doctest::Approx(-1.0));
  CHECK(x.data[1] == doctest::Approx(1.0));
  CHECK(x.data[2] == doctest::Approx(0.0));
}

TEST_CASE("normalize rejects an all-zero map") {
  const HeightMap z(4, 4, 1.0f);
  CHECK_THROWS_AS(normalize(z, 10.0f), NoRoofData);
}

TEST_CASE("denormalize inverts the listed fixtures") {
  NormalizedMap x;
  x.width = 2;
  x.height = 1;
  x.data = {0.0f, 0.0f};
  x.missing = {0, 0};
  x.params = {5.0f, 5.0f, 10.0f, 1.0f};
  const HeightMap z = denormalize(x);
  CHECK(z.at(0, 0) == doctest::Approx(5.0));

  NormParams p{2.0f, 8.0f, 10.0f, 1.0f};
  CHECK(denormalize_value(0.6f, p) == doctest::Approx(8.0).epsilon(1e-6));
}

TEST_CASE("round trip recovers nonzero heights within 1e-5 m") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    // every third map spans more than the cap
    const double hi = trial % 3 == 0 ? rng.uniform(12.0, 40.0) : rng.uniform(2.0, 9.0);
    const HeightMap z = random_map(rng, 16, 16, 0.5, hi, 0.3);
    const NormalizedMap x = normalize(z, 10.0f);
    for (float v : x.data) {
      CHECK(v >= -1.0f - 1e-6f);
      CHECK(v <= 1.0f + 1e-6f);
    }
    const HeightMap back = denormalize(x);
    for (size_t i = 0; i < z.size(); ++i) {
      if (z.values()[i] > 0.0f) {
        CHECK(std::abs(back.values()[i] - z.values()[i]) < 1e-5f);
      } else {
        CHECK(back.values()[i] == 0.0f);
      }
    }
  }
}

TEST_CASE("infer_footprint marks exactly the nonzero pixels") {
  Rng rng(3);
  const HeightMap z = random_map(rng, 12, 9, 1.0, 5.0, 0.4);
  const Footprint fp = infer_footprint(z);
  CHECK(fp.popcount() == z.nonzero_count());
  for (int y = 0; y < z.height(); ++y)
    for (int x = 0; x < z.width(); ++x) CHECK((fp.at(x, y) == 1) == (z.at(x, y) > 0.0f));
}

TEST_CASE("rhm files round trip bit-exactly") {
  Rng rng(9);
  const HeightMap z = random_map(rng, 7, 5, 0.5, 12.0, 0.2);
  const auto path = std::filesystem::temp_directory_path() / "roofkit_test_map.rhm";
  write_rhm(path, z);
  const HeightMap back = read_rhm(path);
  CHECK(back.width() == z.width());
  CHECK(back.height() == z.height());
  CHECK(back.pixel_size() == z.pixel_size());
  for (size_t i = 0; i < z.size(); ++i) CHECK(back.values()[i] == z.values()[i]);

  const Footprint fp = infer_footprint(z);
  const auto fp_path = std::filesystem::temp_directory_path() / "roofkit_test_fp.rhm";
  write_footprint(fp_path, fp, z.pixel_size());
  const Footprint fp_back = read_footprint(fp_path);
  CHECK(fp_back.mask == fp.mask);
  std::filesystem::remove(path);
  std::filesystem::remove(fp_path);
}

TEST_CASE("sidecar json round trips the normalization parameters") {
  Sidecar sc;
  sc.params = {1.25f, 9.5f, 10.0f, 0.75f};
  sc.lon = 16.93;
  sc.lat = 52.41;
  const auto path = std::filesystem::temp_directory_path() / "roofkit_test_sidecar.json";
  write_sidecar(path, sc);
  const Sidecar back = read_sidecar(path);
  CHECK(back.params.z_min == sc.params.z_min);
  CHECK(back.params.z_max == sc.params.z_max);
  CHECK(back.params.range_cap == sc.params.range_cap);
  CHECK(back.params.extra_scale == sc.params.extra_scale);
  CHECK(back.lon == doctest::Approx(sc.lon));
  CHECK(back.lat == doctest::Approx(sc.lat));
  std::filesystem::remove(path);
}
