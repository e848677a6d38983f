#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pulsegrid/tensor.hpp"

namespace pulsegrid {

// One parameter group to verify: `data` is perturbed in place and restored,
// `grad` holds the analytic gradient of the checked scalar wrt `data`.
// The caller must have populated `grad` (one backward pass) before the check,
// and `f` must re-evaluate the same scalar deterministically.
struct GradProbe {
  std::string name;
  real* data = nullptr;
  const real* grad = nullptr;
  int64_t size = 0;
};

struct GradCheckEntry {
  std::string group;
  real max_rel_err = 0.0;
  int64_t coords_checked = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;

  real max_rel_err() const;
  bool pass(real tolerance) const { return max_rel_err() < tolerance; }
};

// Central differences (f(x+ε)−f(x−ε))/2ε against the analytic gradient.
// Relative error uses a unit floor: |a−n| / max(1, |a|, |n|).
// At most `max_coords_per_group` coordinates per probe are evaluated
// (0 = all), sampled without replacement from `rng`.
GradCheckReport grad_check(const std::function<real()>& f, std::vector<GradProbe> probes,
                           real eps, int64_t max_coords_per_group, std::mt19937_64& rng);

GradProbe probe_of(const std::string& name, Tensor& param, const Tensor& grad);

}  // namespace pulsegrid
