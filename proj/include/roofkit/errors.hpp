#pragma once

#include <stdexcept>
#include <string>

namespace roofkit {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input height map has no nonzero pixel to normalize against.
struct NoRoofData : Error {
  using Error::Error;
};

// Mesh contains no triangle with nonzero projected area.
struct EmptyMesh : Error {
  using Error::Error;
};

// Requested incompleteness exceeds the footprint size.
struct InfeasibleMask : Error {
  using Error::Error;
};

// Rejection sampling for the benchmark mask exhausted its draw budget.
struct MaskSamplingStalled : Error {
  using Error::Error;
};

// No pixel outside the footprint is available as a tree center.
struct CannotPlaceTree : Error {
  using Error::Error;
};

struct BadSchedule : Error {
  using Error::Error;
};

struct EmptyFootprint : Error {
  using Error::Error;
};

// Inpainting input has no known (nonzero) pixel.
struct NoData : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace roofkit
