#pragma once

#include <cstdint>
#include <vector>

#include "pulsegrid/tensor.hpp"

namespace pulsegrid {

// 1cycle policy: linear ramp lr_min -> lr_max over the first half of the run
// and back down over the second half. Knots: (0, lr_min), (total/2, lr_max),
// (total-1, lr_min).
real one_cycle_lr(int64_t step, int64_t total_steps, real lr_min, real lr_max);

// Learning-rate range-test curve analysis: Gaussian smoothing over log10(lr)
// (sigma in decades), lr_max = argmin of the smoothed metric, lr_min =
// lr_max / 100. A minimum sitting on either grid edge sets boundary_warning.
struct LrCurve {
  std::vector<real> lrs;       // probed rates (finite metrics only)
  std::vector<real> metric;    // raw metric per probe
  std::vector<real> smoothed;  // Gaussian-smoothed metric
  real lr_min = 0.0;
  real lr_max = 0.0;
  bool boundary_warning = false;
};

LrCurve analyze_lr_curve(const std::vector<real>& lrs, const std::vector<real>& metric,
                         real sigma_decades = 0.5);

// Log-spaced probe grid covering [1e-7, 10].
std::vector<real> default_lr_grid(int points_per_decade = 4);

}  // namespace pulsegrid
