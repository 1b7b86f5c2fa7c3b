#include "roofkit/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "roofkit/errors.hpp"

namespace roofkit {

TriangleMesh load_obj(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path.string());
  TriangleMesh mesh;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) throw IoError("bad vertex record: " + line);
      mesh.vertices.push_back({x, y, z});
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ss >> tok) {
        // "i", "i/j", "i/j/k" -> leading integer only
        const int i = std::stoi(tok.substr(0, tok.find('/')));
        const int n = static_cast<int>(mesh.vertices.size());
        const int resolved = i > 0 ? i - 1 : n + i;  // negative = relative
        if (resolved < 0 || resolved >= n) throw IoError("face index out of range: " + line);
        idx.push_back(resolved);
      }
      if (idx.size() < 3) throw IoError("face with fewer than 3 vertices: " + line);
      for (size_t k = 2; k < idx.size(); ++k)
        mesh.triangles.push_back({idx[0], idx[k - 1], idx[k]});
    }
  }
  return mesh;
}

void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os.precision(9);
  for (const auto& v : mesh.vertices) os << "v " << v[0] << " " << v[1] << " " << v[2] << "\n";
  for (const auto& t : mesh.triangles)
    os << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
}

HeightMap rasterize(const TriangleMesh& mesh, float pixel_size, int width, int height) {
  if (mesh.vertices.empty() || mesh.triangles.empty())
    throw EmptyMesh("rasterize: mesh has no triangles");
  HeightMap out(width, height, pixel_size);

  constexpr double kAreaEps = 1e-12;
  constexpr double kEdgeEps = 1e-9;
  int valid = 0;
  for (const auto& tri : mesh.triangles) {
    const auto& a = mesh.vertices[tri[0]];
    const auto& b = mesh.vertices[tri[1]];
    const auto& c = mesh.vertices[tri[2]];
    const double area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    if (std::abs(area) < kAreaEps) continue;  // degenerate in projection
    ++valid;

    const double min_x = std::min({a[0], b[0], c[0]});
    const double max_x = std::max({a[0], b[0], c[0]});
    const double min_y = std::min({a[1], b[1], c[1]});
    const double max_y = std::max({a[1], b[1], c[1]});
    const int x0 = std::max(0, static_cast<int>(std::floor(min_x / pixel_size - 0.5)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(max_x / pixel_size)));
    const int y0 = std::max(0, static_cast<int>(std::floor(min_y / pixel_size - 0.5)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(max_y / pixel_size)));

    for (int iy = y0; iy <= y1; ++iy) {
      const double py = (iy + 0.5) * pixel_size;
      for (int ix = x0; ix <= x1; ++ix) {
        const double px = (ix + 0.5) * pixel_size;
        // Barycentric weights, normalized by the signed area.
        const double w0 = ((b[0] - px) * (c[1] - py) - (b[1] - py) * (c[0] - px)) / area;
        const double w1 = ((c[0] - px) * (a[1] - py) - (c[1] - py) * (a[0] - px)) / area;
        const double w2 = 1.0 - w0 - w1;
        if (w0 < -kEdgeEps || w1 < -kEdgeEps || w2 < -kEdgeEps) continue;
        const double z = w0 * a[2] + w1 * b[2] + w2 * c[2];
        if (z > out.at(ix, iy)) out.at(ix, iy) = static_cast<float>(z);
      }
    }
  }
  if (valid == 0) throw EmptyMesh("rasterize: no triangle with nonzero projected area");
  return out;
}

}  // namespace roofkit
