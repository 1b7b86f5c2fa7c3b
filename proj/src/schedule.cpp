#include "roofkit/schedule.hpp"

#include <cmath>

#include "roofkit/errors.hpp"

namespace roofkit {

DiffusionSchedule make_schedule(int T, double beta_start, double beta_end) {
  if (T < 1) throw BadSchedule("schedule needs T >= 1");
  if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0))
    throw BadSchedule("schedule needs 0 < beta_start <= beta_end < 1");
  DiffusionSchedule s;
  s.T = T;
  s.beta_start = beta_start;
  s.beta_end = beta_end;
  s.alpha.resize(T + 1);
  s.alpha_bar.resize(T + 1);
  s.alpha[0] = 1.0;
  s.alpha_bar[0] = 1.0;
  for (int t = 1; t <= T; ++t) {
    const double beta =
        T == 1 ? beta_start : beta_start + (beta_end - beta_start) * (t - 1) / (T - 1);
    s.alpha[t] = 1.0 - beta;
    s.alpha_bar[t] = s.alpha_bar[t - 1] * s.alpha[t];
  }
  return s;
}

std::vector<SubStep> substeps(const DiffusionSchedule& schedule, int n) {
  if (n < 1 || n > schedule.T) throw BadSchedule("substep count must be in [1, T]");
  std::vector<SubStep> steps(n);
  int prev_t = 0;
  for (int k = 0; k < n; ++k) {
    int t;
    if (n == 1)
      t = schedule.T;
    else
      t = 1 + static_cast<int>(std::lround(static_cast<double>(k) * (schedule.T - 1) / (n - 1)));
    steps[k].t = t;
    steps[k].alpha_bar = schedule.alpha_bar[t];
    steps[k].alpha = schedule.alpha_bar[t] / schedule.alpha_bar[prev_t];
    prev_t = t;
  }
  return steps;
}

}  // namespace roofkit
