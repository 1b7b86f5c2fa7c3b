#pragma once

#include <vector>

namespace roofkit {

// Variance schedule shared by the forward kernel, the sampler and the loss.
// alpha[t] and alpha_bar[t] are indexed 1..T; index 0 holds the t=0 identity
// (alpha_bar[0] = 1).
struct DiffusionSchedule {
  int T = 0;
  double beta_start = 0.0;
  double beta_end = 0.0;
  std::vector<double> alpha;
  std::vector<double> alpha_bar;
};

// Linear beta ramp: alpha_t = 1 - beta_t, alpha_bar by cumulative product.
// Throws BadSchedule unless 0 < beta_start <= beta_end < 1 and T >= 1.
DiffusionSchedule make_schedule(int T, double beta_start, double beta_end);

// One step of a possibly reduced chain. `alpha` is the effective per-step
// retention alpha_bar[t_k] / alpha_bar[t_{k-1}] after re-indexing.
struct SubStep {
  int t = 0;
  double alpha = 0.0;
  double alpha_bar = 0.0;
};

// Evenly spaced sub-schedule with n steps, ascending t, always containing
// t=1 and t=T. n = T reproduces the full chain.
std::vector<SubStep> substeps(const DiffusionSchedule& schedule, int n);

}  // namespace roofkit
