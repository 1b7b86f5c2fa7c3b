#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "roofkit/corruption.hpp"
#include "roofkit/errors.hpp"
#include "roofkit/raster.hpp"
#include "roofkit/rng.hpp"

using namespace roofkit;

namespace {

HeightMap flat_map(int w, int h, float value) {
  HeightMap z(w, h, 1.0f, value);
  return z;
}

Footprint rect_footprint(int w, int h, int x0, int y0, int x1, int y1) {
  Footprint fp(w, h);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) fp.at(x, y) = 1;
  return fp;
}

}  // namespace

TEST_CASE("sparsity removes the exact pixel count inside the footprint") {
  const HeightMap z = flat_map(20, 20, 4.0f);
  const Footprint fp = rect_footprint(20, 20, 0, 0, 20, 10);  // 200 pixels
  Rng rng(5);

  SUBCASE("s = 0 is the identity") {
    const HeightMap out = inject_sparsity(z, fp, 0.0, rng);
    CHECK(std::equal(out.values().begin(), out.values().end(), z.values().begin()));
  }
  SUBCASE("s = 100 clears the footprint") {
    const HeightMap out = inject_sparsity(z, fp, 100.0, rng);
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 20; ++x) CHECK(out.at(x, y) == 0.0f);
  }
  SUBCASE("s = 50 on 200 pixels zeroes exactly 100") {
    const HeightMap out = inject_sparsity(z, fp, 50.0, rng);
    int zeroed = 0, outside_changed = 0;
    for (int y = 0; y < 20; ++y) {
      for (int x = 0; x < 20; ++x) {
        if (fp.at(x, y) && out.at(x, y) == 0.0f) ++zeroed;
        if (!fp.at(x, y) && out.at(x, y) != z.at(x, y)) ++outside_changed;
      }
    }
    CHECK(zeroed == 100);
    CHECK(outside_changed == 0);
  }
}

TEST_CASE("gauss mixture density closed forms") {
  GaussComponent g{10.0, 10.0, 2.0, 2.0};
  CHECK(gauss_density(g, 10.0, 10.0) == doctest::Approx(1.0));
  CHECK(gauss_density(g, 12.0, 10.0) == doctest::Approx(std::exp(-0.5)));

  GaussComponent far{500.0, 500.0, 1.0, 1.0};
  const GaussComponent components[] = {g, far};
  CHECK(gmm_density(components, 10.0, 10.0) == doctest::Approx(0.5).epsilon(1e-6));

  GaussComponent point{4.0, 6.0, 0.0, 0.0};
  CHECK(gauss_density(point, 4.0, 6.0) == doctest::Approx(1.0));
  CHECK(gauss_density(point, 5.0, 6.0) == 0.0);
}

TEST_CASE("training mask degenerates to component means at sigma 0") {
  const Footprint fp = rect_footprint(32, 32, 0, 0, 32, 32);
  CorruptionSpec spec;
  spec.gmm_count = 4;
  spec.sigma_min = 0.0;
  spec.sigma_max = 0.0;
  Rng rng(2);
  const Footprint mask = incompleteness_mask_training(fp, spec, rng);
  CHECK(mask.popcount() <= 4);
}

TEST_CASE("training mask saturates the footprint under a huge component") {
  const Footprint fp = rect_footprint(16, 16, 2, 2, 14, 14);
  const GaussComponent huge{8.0, 8.0, 1e4, 1e4};
  const GaussComponent components[] = {huge};
  Rng rng(3);
  const Footprint mask = incompleteness_mask_training(fp, components, rng);
  CHECK(mask.popcount() == fp.popcount());
  for (size_t i = 0; i < mask.mask.size(); ++i)
    if (!fp.mask[i]) CHECK(mask.mask[i] == 0);
}

TEST_CASE("training mask marginal matches the closed form") {
  // Frozen components; frequency over many runs vs 1 - prod(1 - p_g).
  const Footprint fp = rect_footprint(16, 16, 0, 0, 16, 16);
  const GaussComponent components[] = {{4.0, 5.0, 2.0, 3.0}, {11.0, 10.0, 4.0, 1.5}};
  const int runs = 4000;
  std::vector<int> hits(fp.mask.size(), 0);
  for (int r = 0; r < runs; ++r) {
    Rng rng(1000 + r);
    const Footprint mask = incompleteness_mask_training(fp, components, rng);
    for (size_t i = 0; i < mask.mask.size(); ++i) hits[i] += mask.mask[i];
  }
  int outside_3sigma = 0;
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      double q = 1.0;
      for (const auto& g : components) q *= 1.0 - gauss_density(g, x, y);
      q = 1.0 - q;
      const double freq = static_cast<double>(hits[static_cast<size_t>(y) * 16 + x]) / runs;
      const double bound = 3.0 * std::sqrt(q * (1.0 - q) / runs);
      if (std::abs(freq - q) > bound) ++outside_3sigma;
    }
  }
  // ~0.3% of 256 pixels may fall outside by chance; the frozen seed keeps it at zero.
  CHECK(outside_3sigma == 0);
}

TEST_CASE("benchmark mask hits the exact count inside the footprint") {
  const Footprint fp = rect_footprint(32, 32, 3, 3, 28, 23);  // 500 pixels
  REQUIRE(fp.popcount() == 500);
  CorruptionSpec spec;

  SUBCASE("i = 0 is empty") {
    Rng rng(4);
    CHECK(incompleteness_mask_benchmark(fp, 0.0, spec, rng).popcount() == 0);
  }
  SUBCASE("i = 80 marks exactly 400 pixels, all inside") {
    Rng rng(4);
    const Footprint mask = incompleteness_mask_benchmark(fp, 80.0, spec, rng);
    CHECK(mask.popcount() == 400);
    for (size_t i = 0; i < mask.mask.size(); ++i)
      if (mask.mask[i]) CHECK(fp.mask[i] == 1);
  }
  SUBCASE("i = 100 reproduces the footprint") {
    Rng rng(4);
    const Footprint mask = incompleteness_mask_benchmark(fp, 100.0, spec, rng);
    CHECK(mask.mask == fp.mask);
  }
  SUBCASE("targets beyond the footprint are rejected") {
    Rng rng(4);
    CHECK_THROWS_AS(incompleteness_mask_benchmark(fp, 120.0, spec, rng), InfeasibleMask);
  }
}

TEST_CASE("incompleteness injection zeroes exactly the masked pixels") {
  const HeightMap z = flat_map(10, 10, 2.0f);
  Footprint mask(10, 10);

  SUBCASE("empty mask is the identity") {
    const HeightMap out = inject_incompleteness(z, mask);
    CHECK(std::equal(out.values().begin(), out.values().end(), z.values().begin()));
  }
  SUBCASE("masked pixels drop to zero, others stay") {
    mask.at(2, 3) = 1;
    mask.at(7, 7) = 1;
    const HeightMap out = inject_incompleteness(z, mask);
    int changed = 0;
    for (size_t i = 0; i < out.size(); ++i)
      if (out.values()[i] != z.values()[i]) ++changed;
    CHECK(changed == 2);
    CHECK(out.at(2, 3) == 0.0f);
    CHECK(out.at(7, 7) == 0.0f);
  }
}

TEST_CASE("tree injection composites by max and respects the footprint") {
  // Low flat roof occupying the left half; trees land on the right.
  HeightMap z(16, 16, 1.0f);
  Footprint fp(16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 8; ++x) {
      z.at(x, y) = 2.0f;
      fp.at(x, y) = 1;
    }

  // Tall cylindrical canopy: max-compositing must lift covered pixels to 8 m.
  HeightMap cylinder(5, 5, 1.0f);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x)
      if (std::hypot(x - 2.0, y - 2.0) <= 2.2) cylinder.at(x, y) = 8.0f;
  const HeightMap canopies[] = {cylinder};

  CorruptionSpec spec;
  spec.tree_count_min = spec.tree_count_max = 3;
  spec.tree_xy_min = spec.tree_xy_max = 1.0;
  spec.tree_z_min = spec.tree_z_max = 1.0;

  for (uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    std::vector<TreePlacement> placements;
    const HeightMap out = inject_trees(z, fp, canopies, spec, rng, &placements);
    for (size_t i = 0; i < out.size(); ++i) CHECK(out.values()[i] >= z.values()[i]);
    for (const auto& tree : placements) {
      CHECK(fp.at(tree.center_x, tree.center_y) == 0);
      if (tree.accepted) CHECK(tree.replaced_pixels >= 1);
    }
    bool any_tree_pixel = false;
    for (size_t i = 0; i < out.size(); ++i)
      if (out.values()[i] > z.values()[i]) any_tree_pixel = true;
    CHECK(any_tree_pixel);
  }
}

TEST_CASE("tree injection with zero count is the identity") {
  HeightMap z = flat_map(8, 8, 3.0f);
  Footprint fp = rect_footprint(8, 8, 0, 0, 4, 8);
  const HeightMap canopies[] = {flat_map(3, 3, 5.0f)};
  CorruptionSpec spec;
  spec.tree_count_min = spec.tree_count_max = 0;
  Rng rng(1);
  const HeightMap out = inject_trees(z, fp, canopies, spec, rng);
  CHECK(std::equal(out.values().begin(), out.values().end(), z.values().begin()));
}

TEST_CASE("tree injection needs room outside the footprint") {
  HeightMap z = flat_map(8, 8, 3.0f);
  const Footprint fp = rect_footprint(8, 8, 0, 0, 8, 8);  // everything is roof
  const HeightMap canopies[] = {flat_map(3, 3, 5.0f)};
  CorruptionSpec spec;
  Rng rng(1);
  CHECK_THROWS_AS(inject_trees(z, fp, canopies, spec, rng), CannotPlaceTree);
}

TEST_CASE("global noise perturbs only measured pixels with the drawn sigma") {
  NormalizedMap x;
  x.width = 128;
  x.height = 128;
  x.data.assign(128 * 128, 0.2f);
  x.missing.assign(128 * 128, 0);
  for (size_t i = 0; i < x.missing.size(); i += 7) {
    x.missing[i] = 1;
    x.data[i] = 0.0f;
  }

  SUBCASE("sigma_max = 0 is the identity") {
    Rng rng(1);
    const NormalizedMap out = inject_global_noise(x, 0.0, rng);
    CHECK(out.data == x.data);
  }
  SUBCASE("per-map noise std matches the drawn sigma within 5%") {
    Rng probe(77);
    const double sigma = probe.uniform(0.0, 0.05);  // same first draw as below
    Rng rng(77);
    const NormalizedMap out = inject_global_noise(x, 0.05, rng);
    double sq = 0.0;
    int64_t n = 0;
    for (size_t i = 0; i < out.data.size(); ++i) {
      if (x.missing[i]) {
        CHECK(out.data[i] == x.data[i]);
        continue;
      }
      const double d = out.data[i] - x.data[i];
      sq += d * d;
      ++n;
    }
    const double measured = std::sqrt(sq / n);
    CHECK(measured == doctest::Approx(sigma).epsilon(0.05));
  }
}

TEST_CASE("outlier injection replaces measured pixels uniformly") {
  NormalizedMap x;
  x.width = 100;
  x.height = 100;
  x.data.assign(10000, 0.5f);
  x.missing.assign(10000, 0);

  SUBCASE("prob = 0 is the identity") {
    Rng rng(1);
    CHECK(inject_outliers(x, 0.0, rng).data == x.data);
  }
  SUBCASE("prob = 1 resamples everything into [-1, 1] roughly uniformly") {
    Rng rng(12);
    const NormalizedMap out = inject_outliers(x, 1.0, rng);
    std::vector<float> sorted = out.data;
    std::sort(sorted.begin(), sorted.end());
    double ks = 0.0;
    for (size_t i = 0; i < sorted.size(); ++i) {
      CHECK(sorted[i] >= -1.0f);
      CHECK(sorted[i] <= 1.0f);
      const double cdf = (sorted[i] + 1.0) / 2.0;
      const double emp_hi = static_cast<double>(i + 1) / sorted.size();
      const double emp_lo = static_cast<double>(i) / sorted.size();
      ks = std::max({ks, std::abs(cdf - emp_hi), std::abs(cdf - emp_lo)});
    }
    // 1.63 / sqrt(n) is the 1% critical value; frozen seed sits well inside.
    CHECK(ks < 1.63 / std::sqrt(10000.0));
  }
  SUBCASE("replacement count sits inside binomial 3 sigma") {
    const double p = 0.02;
    Rng rng(9);
    const NormalizedMap out = inject_outliers(x, p, rng);
    int replaced = 0;
    for (size_t i = 0; i < out.data.size(); ++i)
      if (out.data[i] != x.data[i]) ++replaced;
    const double mean = p * 10000;
    const double sd = std::sqrt(10000 * p * (1 - p));
    CHECK(replaced > mean - 3 * sd);
    CHECK(replaced < mean + 3 * sd);
  }
}

TEST_CASE("synthesize is deterministic and neutral when asked to be") {
  HeightMap z(24, 24, 1.0f);
  for (int y = 4; y < 20; ++y)
    for (int x = 4; x < 20; ++x) z.at(x, y) = 3.0f + 0.1f * x;
  const Footprint fp = infer_footprint(z);
  const auto canopies = procedural_tree_library(4, 99);

  SUBCASE("all-neutral spec returns the input") {
    CorruptionSpec neutral;
    neutral.sparsity_pct = 0;
    neutral.incompleteness_pct = 0;
    neutral.tree_probability = 0;
    const SynthesisResult r = synthesize(z, fp, canopies, neutral);
    CHECK(std::equal(r.corrupted.values().begin(), r.corrupted.values().end(),
                     z.values().begin()));
  }
  SUBCASE("same seed gives bit-identical output") {
    CorruptionSpec spec = preset_spec("s95_i30");
    spec.tree_probability = 1.0;
    spec.seed = 1234;
    const SynthesisResult a = synthesize(z, fp, canopies, spec);
    const SynthesisResult b = synthesize(z, fp, canopies, spec);
    CHECK(std::equal(a.corrupted.values().begin(), a.corrupted.values().end(),
                     b.corrupted.values().begin()));
    CHECK(a.record.trees_applied == b.record.trees_applied);
  }
  SUBCASE("s95 i30 leaves at most the surviving fraction plus trees") {
    CorruptionSpec spec = preset_spec("s95_i30");
    spec.tree_probability = 1.0;
    spec.seed = 77;
    const SynthesisResult r = synthesize(z, fp, canopies, spec);
    int survivors = 0;
    for (int y = 0; y < 24; ++y)
      for (int x = 0; x < 24; ++x)
        if (fp.at(x, y) && r.corrupted.at(x, y) > 0.0f && r.corrupted.at(x, y) == z.at(x, y))
          ++survivors;
    // sparsity keeps 5%, incompleteness can only remove more
    CHECK(survivors <= static_cast<int>(0.05 * fp.popcount()) + 1);
  }
}

TEST_CASE("preset names parse into spec fields") {
  const CorruptionSpec a = preset_spec("s95_i30");
  CHECK(a.sparsity_pct == doctest::Approx(95.0));
  CHECK(a.incompleteness_pct == doctest::Approx(30.0));
  const CorruptionSpec b = preset_spec("s99.75_i0");
  CHECK(b.sparsity_pct == doctest::Approx(99.75));
  CHECK(b.incompleteness_pct == doctest::Approx(0.0));
  const CorruptionSpec c = preset_spec("s90 i80");
  CHECK(c.sparsity_pct == doctest::Approx(90.0));
  CHECK(c.incompleteness_pct == doctest::Approx(80.0));
  CHECK_THROWS_AS(preset_spec("x13"), ConfigError);
  CHECK_THROWS_AS(preset_spec(""), ConfigError);
}

TEST_CASE("corruption spec validation rejects out-of-range fields") {
  CorruptionSpec spec;
  spec.sparsity_pct = 101.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = CorruptionSpec{};
  spec.tree_count_min = 5;
  spec.tree_count_max = 2;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = CorruptionSpec{};
  spec.outlier_prob = 1.5;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}
