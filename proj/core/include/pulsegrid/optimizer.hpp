#pragma once

#include <cstdint>
#include <vector>

#include "pulsegrid/model.hpp"

namespace pulsegrid {

struct AdamConfig {
  real beta1 = 0.9;
  real beta2 = 0.999;
  real eps = 1e-8;
};

// Standard Adam with bias correction. Moment buffers follow the parameter
// order handed in at construction; the step counter is shared. A non-finite
// gradient aborts the step with a diagnostic naming the parameter group.
class Adam {
 public:
  explicit Adam(std::vector<NamedGrad> params, AdamConfig cfg = {});

  void step(real lr);

  int64_t steps_taken() const { return t_; }

 private:
  std::vector<NamedGrad> params_;
  std::vector<Tensor> m_, v_;
  AdamConfig cfg_;
  int64_t t_ = 0;
};

}  // namespace pulsegrid
