#include "pulsegrid/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pulsegrid {

real GradCheckReport::max_rel_err() const {
  real m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.max_rel_err);
  return m;
}

GradProbe probe_of(const std::string& name, Tensor& param, const Tensor& grad) {
  if (!param.same_shape(grad))
    throw std::invalid_argument("probe " + name + ": parameter " + param.shape_str() +
                                " and gradient " + grad.shape_str() + " differ in shape");
  return GradProbe{name, param.data(), grad.data(), param.numel()};
}

GradCheckReport grad_check(const std::function<real()>& f, std::vector<GradProbe> probes,
                           real eps, int64_t max_coords_per_group, std::mt19937_64& rng) {
  if (!(eps > 0)) throw std::invalid_argument("grad_check requires eps > 0");
  GradCheckReport report;
  for (const auto& p : probes) {
    std::vector<int64_t> idx(static_cast<size_t>(p.size));
    std::iota(idx.begin(), idx.end(), 0);
    if (max_coords_per_group > 0 && p.size > max_coords_per_group) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(static_cast<size_t>(max_coords_per_group));
    }
    GradCheckEntry entry{p.name, 0.0, static_cast<int64_t>(idx.size())};
    for (int64_t i : idx) {
      const real saved = p.data[i];
      p.data[i] = saved + eps;
      const real up = f();
      p.data[i] = saved - eps;
      const real down = f();
      p.data[i] = saved;
      const real numeric = (up - down) / (2.0 * eps);
      const real analytic = p.grad[i];
      const real rel = std::abs(analytic - numeric) /
                       std::max({1.0, std::abs(analytic), std::abs(numeric)});
      entry.max_rel_err = std::max(entry.max_rel_err, rel);
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace pulsegrid
