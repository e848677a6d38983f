#pragma once

#include <cstdint>
#include <vector>

#include "pulsegrid/data.hpp"

namespace pulsegrid {

// Synthetic color-signal generator standing in for physical recordings at
// desk scale. Each channel carries a pulse waveform (fundamental plus a 0.3
// second harmonic), a per-channel baseline, slow baseline drift, and white
// Gaussian noise at the configured SNR. Green channels get the largest pulse
// amplitude and per-ROI factors emulate ROI informativeness. Sequences are
// tagged round-robin with cam1..cam3 (small per-camera amplitude/noise
// profiles) and alternate stationary / mixed_motion scenarios; mixed_motion
// adds stronger drift and noise.
struct SynthConfig {
  int n_sequences = 12;
  real duration_s = 60.0;
  real hr_lo = 50.0;
  real hr_hi = 110.0;
  real snr_db = 15.0;
  uint64_t seed = 0;
  real hr_drift_bpm = 0.0;  // peak-to-peak slow reference-HR drift
  bool tag_cameras = true;  // false tags everything camera/scenario synthetic

  void validate() const;  // hr range must lie inside [40,125]
};

std::vector<ColorSignalSequence> synth_generate(const SynthConfig& config);

}  // namespace pulsegrid
