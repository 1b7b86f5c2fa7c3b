#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "roofkit/errors.hpp"
#include "roofkit/mesh.hpp"

using namespace roofkit;

namespace {

TriangleMesh quad(double x0, double y0, double x1, double y1, double z) {
  TriangleMesh m;
  m.vertices = {{x0, y0, z}, {x1, y0, z}, {x1, y1, z}, {x0, y1, z}};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  return m;
}

}  // namespace

TEST_CASE("horizontal triangle covering the grid rasterizes flat") {
  TriangleMesh m;
  m.vertices = {{-10, -10, 3}, {30, -10, 3}, {10, 30, 3}};
  m.triangles = {{0, 1, 2}};
  const HeightMap z = rasterize(m, 1.0f, 8, 8);
  for (float v : z.values()) CHECK(v == doctest::Approx(3.0));
}

TEST_CASE("overlapping surfaces keep the maximum") {
  TriangleMesh m = quad(0, 0, 8, 8, 2.0);
  const TriangleMesh high = quad(2, 2, 6, 6, 5.0);
  m.vertices.insert(m.vertices.end(), high.vertices.begin(), high.vertices.end());
  m.triangles.push_back({4, 5, 6});
  m.triangles.push_back({4, 6, 7});
  const HeightMap z = rasterize(m, 1.0f, 8, 8);
  CHECK(z.at(4, 4) == doctest::Approx(5.0));
  CHECK(z.at(0, 0) == doctest::Approx(2.0));
  CHECK(z.at(7, 7) == doctest::Approx(2.0));
}

TEST_CASE("a slanted plane matches its closed form at pixel centers") {
  // z = x over [0, 8]^2, split into two triangles
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {8, 0, 8}, {8, 8, 8}, {0, 8, 0}};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  const HeightMap z = rasterize(m, 1.0f, 8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) CHECK(std::abs(z.at(x, y) - (x + 0.5)) < 1e-6);
}

TEST_CASE("rasterization is monotone under added triangles") {
  TriangleMesh base = quad(0, 0, 6, 6, 2.0);
  const HeightMap before = rasterize(base, 1.0f, 8, 8);
  base.vertices.insert(base.vertices.end(), {{1, 1, 9}, {5, 1, 9}, {3, 5, 9}});
  base.triangles.push_back({4, 5, 6});
  const HeightMap after = rasterize(base, 1.0f, 8, 8);
  for (size_t i = 0; i < before.size(); ++i) CHECK(after.values()[i] >= before.values()[i]);
}

TEST_CASE("degenerate-only meshes are rejected") {
  TriangleMesh m;
  m.vertices = {{0, 0, 1}, {4, 0, 1}, {8, 0, 1}};  // collinear
  m.triangles = {{0, 1, 2}};
  CHECK_THROWS_AS(rasterize(m, 1.0f, 8, 8), EmptyMesh);
  TriangleMesh empty;
  CHECK_THROWS_AS(rasterize(empty, 1.0f, 8, 8), EmptyMesh);
}

TEST_CASE("obj loader reads v/f records with fan triangulation") {
  const auto path = std::filesystem::temp_directory_path() / "roofkit_test_mesh.obj";
  {
    std::ofstream os(path);
    os << "# comment\n";
    os << "v 0 0 1\nv 4 0 1\nv 4 4 1\nv 0 4 1\n";
    os << "vn 0 0 1\n";
    os << "f 1//1 2//1 3//1 4//1\n";
  }
  const TriangleMesh m = load_obj(path);
  CHECK(m.vertices.size() == 4);
  CHECK(m.triangles.size() == 2);
  const HeightMap z = rasterize(m, 1.0f, 4, 4);
  for (float v : z.values()) CHECK(v == doctest::Approx(1.0));
  std::filesystem::remove(path);
}
