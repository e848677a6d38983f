#pragma once

#include <cmath>
#include <stdexcept>

#include "pulsegrid/tensor.hpp"

namespace pulsegrid {

// Heart-rate class grid: the admissible range [40, 125] bpm split into 128
// equal segments. A label names one segment; its representative HR value
// is the segment midpoint.
struct ClassGrid {
  real hr_min = 40.0;
  real hr_max = 125.0;
  int n_classes = 128;

  real step() const { return (hr_max - hr_min) / n_classes; }

  bool admissible(real hr) const { return hr >= hr_min && hr <= hr_max; }

  int label_of(real hr) const {
    if (!admissible(hr)) {
      throw std::invalid_argument("HR " + std::to_string(hr) + " outside admissible range [" +
                                  std::to_string(hr_min) + "," + std::to_string(hr_max) + "]");
    }
    int label = static_cast<int>(std::floor((hr - hr_min) / step()));
    return label < n_classes ? label : n_classes - 1;
  }

  real hr_of(int label) const { return hr_min + (label + 0.5) * step(); }
};

}  // namespace pulsegrid
