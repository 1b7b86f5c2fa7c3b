#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace roofkit {

// Deterministic xoshiro256++ generator with explicit distributions.
// Results are identical on every platform and independent of the standard
// library, so seeded values can be frozen into tests and reports.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();

  // Uniform in [0, 1).
  double uniform();
  // Uniform in [a, b).
  double uniform(double a, double b);
  // Uniform integer in [lo, hi], inclusive. Unbiased via rejection.
  int64_t uniform_int(int64_t lo, int64_t hi);
  // Standard normal via Box-Muller. Stateless: two uniforms per call.
  double normal();

  // Derive an independent stream; does not advance this generator.
  Rng split(uint64_t stream) const;

 private:
  std::array<uint64_t, 4> s_;
};

// 64-bit FNV-1a, used to fold string ids into seeds.
uint64_t fnv1a64(std::string_view s);

// Mix two 64-bit values into one seed (splitmix64 finalizer).
uint64_t mix_seed(uint64_t a, uint64_t b);

}  // namespace roofkit
