#pragma once

#include "roofkit/raster.hpp"

namespace roofkit {

struct MaeRmse {
  double mae = 0.0;
  double rmse = 0.0;
};

// Mean absolute / root-mean-square height error in meters, over the pixels
// set in `m` (the ground-truth footprint). Throws EmptyFootprint when m has
// no set pixel.
MaeRmse mae_rmse(const HeightMap& pred, const HeightMap& gt, const Footprint& m);

// Intersection-over-union between the set {pred > threshold_m} and the
// reference footprint. An empty union yields 0.
double footprint_iou(const HeightMap& pred, const Footprint& gt_fp, double threshold_m = 0.1);

}  // namespace roofkit
