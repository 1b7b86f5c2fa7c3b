#include "roofkit/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "roofkit/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "RHM I/O assumes a little-endian host");

namespace roofkit {

namespace {

constexpr char kMagic[4] = {'R', 'H', 'M', '1'};

void write_u32(std::ostream& os, uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_f32(std::ostream& os, float v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

uint32_t read_u32(std::istream& is) {
  uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

float read_f32(std::istream& is) {
  float v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

void write_raster(const std::filesystem::path& path, int w, int h, float pixel_size,
                  std::span<const float> values) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os.write(kMagic, 4);
  write_u32(os, static_cast<uint32_t>(w));
  write_u32(os, static_cast<uint32_t>(h));
  write_f32(os, pixel_size);
  os.write(reinterpret_cast<const char*>(values.data()),
           static_cast<std::streamsize>(values.size() * sizeof(float)));
  if (!os) throw IoError("write failed: " + path.string());
}

struct RawRaster {
  uint32_t w = 0, h = 0;
  float pixel_size = 1.0f;
  std::vector<float> values;
};

RawRaster read_raster(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("not an RHM file: " + path.string());
  RawRaster r;
  r.w = read_u32(is);
  r.h = read_u32(is);
  r.pixel_size = read_f32(is);
  if (!is || r.w < 1 || r.h < 1 || r.w > (1u << 20) || r.h > (1u << 20))
    throw IoError("bad RHM header: " + path.string());
  r.values.resize(static_cast<size_t>(r.w) * r.h);
  is.read(reinterpret_cast<char*>(r.values.data()),
          static_cast<std::streamsize>(r.values.size() * sizeof(float)));
  if (!is) throw IoError("truncated RHM file: " + path.string());
  return r;
}

}  // namespace

void write_rhm(const std::filesystem::path& path, const HeightMap& map) {
  write_raster(path, map.width(), map.height(), map.pixel_size(), map.values());
}

HeightMap read_rhm(const std::filesystem::path& path) {
  RawRaster r = read_raster(path);
  HeightMap map(static_cast<int>(r.w), static_cast<int>(r.h), r.pixel_size);
  std::copy(r.values.begin(), r.values.end(), map.values().begin());
  return map;
}

void write_rhm_plane(const std::filesystem::path& path, const Plane& plane, float pixel_size) {
  write_raster(path, plane.width, plane.height, pixel_size, plane.v);
}

void write_footprint(const std::filesystem::path& path, const Footprint& fp, float pixel_size) {
  std::vector<float> values(fp.mask.size());
  for (size_t i = 0; i < fp.mask.size(); ++i) values[i] = fp.mask[i] ? 1.0f : 0.0f;
  write_raster(path, fp.width, fp.height, pixel_size, values);
}

Footprint read_footprint(const std::filesystem::path& path) {
  RawRaster r = read_raster(path);
  Footprint fp(static_cast<int>(r.w), static_cast<int>(r.h));
  for (size_t i = 0; i < r.values.size(); ++i) fp.mask[i] = r.values[i] > 0.5f ? 1 : 0;
  return fp;
}

void write_sidecar(const std::filesystem::path& path, const Sidecar& sc) {
  nlohmann::ordered_json j;
  j["z_min"] = sc.params.z_min;
  j["z_max"] = sc.params.z_max;
  j["range_cap"] = sc.params.range_cap;
  j["extra_scale"] = sc.params.extra_scale;
  j["lon"] = sc.lon;
  j["lat"] = sc.lat;
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os << j.dump(2) << "\n";
}

Sidecar read_sidecar(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad sidecar JSON " + path.string() + ": " + e.what());
  }
  Sidecar sc;
  sc.params.z_min = j.at("z_min").get<float>();
  sc.params.z_max = j.at("z_max").get<float>();
  sc.params.range_cap = j.at("range_cap").get<float>();
  sc.params.extra_scale = j.at("extra_scale").get<float>();
  sc.lon = j.value("lon", 0.0);
  sc.lat = j.value("lat", 0.0);
  return sc;
}

void write_pgm16(const std::filesystem::path& path, const HeightMap& map, float range_cap) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os << "P5\n" << map.width() << " " << map.height() << "\n65535\n";
  for (float z : map.values()) {
    const float scaled = std::clamp(z / range_cap, 0.0f, 1.0f) * 65535.0f;
    const auto v = static_cast<uint16_t>(std::lround(scaled));
    // PGM stores big-endian samples.
    const char bytes[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xff)};
    os.write(bytes, 2);
  }
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace roofkit
