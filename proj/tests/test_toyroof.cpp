#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "roofkit/config.hpp"
#include "roofkit/errors.hpp"
#include "roofkit/toyroof.hpp"

using namespace roofkit;
namespace fs = std::filesystem;

TEST_CASE("flat roof rasterizes to a uniform plateau") {
  RoofSpec spec;
  spec.archetype = RoofArchetype::flat;
  spec.width_m = 10;
  spec.depth_m = 10;
  spec.eave_m = 3;
  spec.ridge_m = 3;
  const ToyRoof roof = gen_toy_roof(spec, 16, 16, 1.0f);
  CHECK(roof.footprint.popcount() == 100);  // 10x10 m at 1 m/px
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      if (roof.footprint.at(x, y)) CHECK(roof.height.at(x, y) == doctest::Approx(3.0));
}

TEST_CASE("gable roof is mirror-symmetric about its ridge") {
  RoofSpec spec;
  spec.archetype = RoofArchetype::gable;
  spec.width_m = 12;
  spec.depth_m = 8;
  spec.eave_m = 3;
  spec.ridge_m = 6;
  const ToyRoof roof = gen_toy_roof(spec, 16, 16, 1.0f);
  // grid center at y = 8; rows 8-1-k and 8+k mirror
  for (int k = 0; k < 4; ++k)
    for (int x = 0; x < 16; ++x)
      CHECK(roof.height.at(x, 7 - k) == doctest::Approx(roof.height.at(x, 8 + k)).epsilon(1e-6));
}

TEST_CASE("gable matches its analytic planes at footprint pixels") {
  RoofSpec spec;
  spec.archetype = RoofArchetype::gable;
  spec.width_m = 12;
  spec.depth_m = 8;
  spec.eave_m = 3;
  spec.ridge_m = 6;
  const int n = 16;
  const ToyRoof roof = gen_toy_roof(spec, n, n, 1.0f);
  const double cy = n / 2.0;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (!roof.footprint.at(x, y)) continue;
      const double local_y = std::abs((y + 0.5) - cy);
      const double expected = spec.ridge_m - (spec.ridge_m - spec.eave_m) * local_y / 4.0;
      CHECK(std::abs(roof.height.at(x, y) - expected) < 1e-6);
    }
  }
}

TEST_CASE("gable ridge pixels carry the exact ridge height") {
  RoofSpec spec;
  spec.archetype = RoofArchetype::gable;
  spec.width_m = 12;
  spec.depth_m = 9;  // odd depth puts the ridge on pixel centers
  spec.eave_m = 3;
  spec.ridge_m = 6;
  const int n = 17;
  const ToyRoof roof = gen_toy_roof(spec, n, n, 1.0f);
  // ridge along y = 8.5 = center row pixel centers
  bool saw_ridge = false;
  for (int x = 0; x < n; ++x) {
    if (roof.footprint.at(x, 8)) {
      CHECK(roof.height.at(x, 8) == doctest::Approx(6.0));
      saw_ridge = true;
    }
  }
  CHECK(saw_ridge);
}

TEST_CASE("hip roof peaks at the ridge and follows its planes") {
  RoofSpec spec;
  spec.archetype = RoofArchetype::hip;
  spec.width_m = 12;
  spec.depth_m = 8;
  spec.eave_m = 3;
  spec.ridge_m = 6;
  // odd grid puts the ridge line on pixel centers
  const int n = 17;
  const ToyRoof roof = gen_toy_roof(spec, n, n, 1.0f);

  float peak = 0.0f;
  for (float v : roof.height.values()) peak = std::max(peak, v);
  CHECK(peak == doctest::Approx(spec.ridge_m).epsilon(1e-6));

  // analytic surface: z = eave + (ridge - eave) * min(hd - |y|, hw - |x|) / hd
  const double hw = 6.0, hd = 4.0, c = n / 2.0;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (!roof.footprint.at(x, y)) continue;
      const double lx = std::abs((x + 0.5) - c);
      const double ly = std::abs((y + 0.5) - c);
      const double rise = std::min(hd - ly, hw - lx) / hd;
      const double expected = 3.0 + 3.0 * rise;
      CHECK(std::abs(roof.height.at(x, y) - expected) < 1e-6);
    }
  }
}

TEST_CASE("degenerate roof specs are rejected") {
  RoofSpec spec;
  spec.width_m = 0.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = RoofSpec{};
  spec.ridge_m = spec.eave_m - 1.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("random specs keep the building inside the grid") {
  Rng rng(77);
  for (int i = 0; i < 50; ++i) {
    const RoofSpec spec = random_roof_spec(rng, 24.0);
    const ToyRoof roof = gen_toy_roof(spec, 24, 24, 1.0f);
    CHECK(roof.footprint.popcount() > 0);
    // nothing may touch the border (everything fits with margin)
    for (int x = 0; x < 24; ++x) {
      CHECK(roof.height.at(x, 0) == 0.0f);
      CHECK(roof.height.at(x, 23) == 0.0f);
    }
  }
}

TEST_CASE("toml configs parse sections, scalars and arrays") {
  const auto path = fs::temp_directory_path() / "roofkit_test_config.toml";
  std::ofstream(path) << "# benchmark corruption\n"
                      << "[corruption]\n"
                      << "sparsity_pct = 92.5\n"
                      << "gmm_count = 3\n"
                      << "tree_probability = 0.0  # disable trees\n"
                      << "\n"
                      << "[train]\n"
                      << "name = \"toy\"\n"
                      << "steps = [60, 125]\n";
  const Config cfg = Config::from_file(path);
  CHECK(cfg.number("corruption.sparsity_pct") == doctest::Approx(92.5));
  CHECK(*cfg.integer("corruption.gmm_count") == 3);
  CHECK(*cfg.str("train.name") == "toy");

  CorruptionSpec spec;
  apply_corruption_config(cfg, spec);
  CHECK(spec.sparsity_pct == doctest::Approx(92.5));
  CHECK(spec.gmm_count == 3);
  CHECK(spec.tree_probability == 0.0);
  fs::remove(path);
}

TEST_CASE("json configs flatten to the same keys") {
  const auto path = fs::temp_directory_path() / "roofkit_test_config.json";
  std::ofstream(path) << R"({"corruption": {"incompleteness_pct": 40, "seed": 9}})";
  const Config cfg = Config::from_file(path);
  CorruptionSpec spec;
  apply_corruption_config(cfg, spec);
  CHECK(spec.incompleteness_pct == doctest::Approx(40.0));
  CHECK(spec.seed == 9);
  fs::remove(path);
}

TEST_CASE("unknown corruption keys are rejected") {
  const auto path = fs::temp_directory_path() / "roofkit_test_config_bad.toml";
  std::ofstream(path) << "[corruption]\nsparsety_pct = 10\n";
  const Config cfg = Config::from_file(path);
  CorruptionSpec spec;
  CHECK_THROWS_AS(apply_corruption_config(cfg, spec), ConfigError);
  fs::remove(path);
}
