#include "pulsegrid/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pulsegrid {

real one_cycle_lr(int64_t step, int64_t total_steps, real lr_min, real lr_max) {
  if (total_steps <= 0) throw std::invalid_argument("one_cycle_lr: total_steps must be positive");
  if (step < 0 || step >= total_steps)
    throw std::invalid_argument("one_cycle_lr: step " + std::to_string(step) +
                                " outside [0," + std::to_string(total_steps - 1) + "]");
  if (!(lr_min < lr_max))
    throw std::invalid_argument("one_cycle_lr: requires lr_min < lr_max");
  if (total_steps == 1) return lr_min;
  const int64_t peak = total_steps / 2;
  if (step == total_steps - 1) return lr_min;
  if (step <= peak) {
    const real f = static_cast<real>(step) / static_cast<real>(peak);
    return lr_min + f * (lr_max - lr_min);
  }
  const real f =
      static_cast<real>(step - peak) / static_cast<real>(total_steps - 1 - peak);
  return lr_max - f * (lr_max - lr_min);
}

LrCurve analyze_lr_curve(const std::vector<real>& lrs, const std::vector<real>& metric,
                         real sigma_decades) {
  if (lrs.size() != metric.size())
    throw std::invalid_argument("analyze_lr_curve: " + std::to_string(lrs.size()) +
                                " rates vs " + std::to_string(metric.size()) + " metrics");
  LrCurve c;
  for (size_t i = 0; i < lrs.size(); ++i) {
    if (!(lrs[i] > 0)) throw std::invalid_argument("analyze_lr_curve: rates must be positive");
    if (std::isfinite(metric[i])) {
      c.lrs.push_back(lrs[i]);
      c.metric.push_back(metric[i]);
    }
  }
  if (c.lrs.empty())
    throw std::runtime_error(
        "all learning-rate probes diverged; retry with a smaller grid range");

  const size_t n = c.lrs.size();
  std::vector<real> logs(n);
  for (size_t i = 0; i < n; ++i) logs[i] = std::log10(c.lrs[i]);
  c.smoothed.resize(n);
  const real two_s2 = 2.0 * sigma_decades * sigma_decades;
  for (size_t i = 0; i < n; ++i) {
    real num = 0.0, den = 0.0;
    for (size_t j = 0; j < n; ++j) {
      const real d = logs[i] - logs[j];
      const real k = std::exp(-d * d / two_s2);
      num += k * c.metric[j];
      den += k;
    }
    c.smoothed[i] = num / den;
  }
  size_t best = 0;
  for (size_t i = 1; i < n; ++i)
    if (c.smoothed[i] < c.smoothed[best]) best = i;
  c.lr_max = c.lrs[best];
  c.lr_min = c.lr_max / 100.0;
  c.boundary_warning = (best == 0 || best == n - 1);
  return c;
}

std::vector<real> default_lr_grid(int points_per_decade) {
  if (points_per_decade <= 0)
    throw std::invalid_argument("default_lr_grid: points_per_decade must be positive");
  std::vector<real> grid;
  const real lo = -7.0, hi = 1.0;
  const int steps = static_cast<int>((hi - lo) * points_per_decade);
  for (int i = 0; i <= steps; ++i)
    grid.push_back(std::pow(10.0, lo + static_cast<real>(i) / points_per_decade));
  return grid;
}

}  // namespace pulsegrid
