#include "roofkit/metrics.hpp"

#include <cmath>

#include "roofkit/errors.hpp"

namespace roofkit {

MaeRmse mae_rmse(const HeightMap& pred, const HeightMap& gt, const Footprint& m) {
  if (pred.width() != gt.width() || pred.height() != gt.height() || !m.same_shape(gt))
    throw Error("mae_rmse: dimensions mismatch");
  double abs_sum = 0.0, sq_sum = 0.0;
  int64_t count = 0;
  const auto p = pred.values();
  const auto g = gt.values();
  for (size_t i = 0; i < p.size(); ++i) {
    if (!m.mask[i]) continue;
    const double e = static_cast<double>(p[i]) - g[i];
    abs_sum += std::abs(e);
    sq_sum += e * e;
    ++count;
  }
  if (count == 0) throw EmptyFootprint("mae_rmse: footprint is empty");
  return {abs_sum / count, std::sqrt(sq_sum / count)};
}

double footprint_iou(const HeightMap& pred, const Footprint& gt_fp, double threshold_m) {
  if (!gt_fp.same_shape(pred)) throw Error("footprint_iou: dimensions mismatch");
  int64_t inter = 0, uni = 0;
  const auto p = pred.values();
  for (size_t i = 0; i < p.size(); ++i) {
    const bool in_pred = p[i] > threshold_m;
    const bool in_gt = gt_fp.mask[i] != 0;
    if (in_pred && in_gt) ++inter;
    if (in_pred || in_gt) ++uni;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace roofkit
