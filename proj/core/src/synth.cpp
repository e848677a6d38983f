#include "pulsegrid/synth.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>

namespace pulsegrid {

void SynthConfig::validate() const {
  if (n_sequences <= 0) throw std::invalid_argument("synth: n_sequences must be positive");
  if (!(duration_s > 0)) throw std::invalid_argument("synth: duration must be positive");
  if (hr_lo < 40.0 || hr_hi > 125.0 || hr_lo > hr_hi)
    throw std::invalid_argument("synth: HR range [" + std::to_string(hr_lo) + "," +
                                std::to_string(hr_hi) + "] must lie inside [40,125]");
  if (hr_drift_bpm < 0) throw std::invalid_argument("synth: hr_drift_bpm must be >= 0");
}

namespace {

constexpr real kPi = 3.14159265358979323846;

// relative pulse informativeness per ROI (nose, bridge, under-eyes, boxes)
constexpr real kRoiFactor[6] = {1.0, 0.85, 0.9, 0.8, 0.7, 0.75};
// green carries the strongest pulse component
constexpr real kColorFactor[3] = {0.5, 1.0, 0.35};

struct CameraProfile {
  real amp;
  real noise;
};
constexpr CameraProfile kCameraProfile[3] = {{1.0, 1.0}, {0.8, 1.25}, {1.2, 0.9}};

}  // namespace

std::vector<ColorSignalSequence> synth_generate(const SynthConfig& config) {
  config.validate();
  std::vector<ColorSignalSequence> out;
  out.reserve(static_cast<size_t>(config.n_sequences));
  const int T = static_cast<int>(std::lround(config.duration_s * kFps));
  const real noise_power_scale =
      std::isinf(config.snr_db) ? 0.0 : std::pow(10.0, -config.snr_db / 10.0);

  for (int s = 0; s < config.n_sequences; ++s) {
    // per-sequence stream: reproducible independently of generation order
    std::mt19937_64 rng(config.seed * 0x9e3779b97f4a7c15ull + static_cast<uint64_t>(s) + 1);
    std::uniform_real_distribution<real> uhr(config.hr_lo, config.hr_hi);
    std::uniform_real_distribution<real> uphase(0.0, 2.0 * kPi);
    std::normal_distribution<real> gauss(0.0, 1.0);

    ColorSignalSequence seq;
    char idbuf[24];
    std::snprintf(idbuf, sizeof(idbuf), "synth-%03d", s + 1);
    seq.id = idbuf;
    seq.fps = kFps;
    if (config.tag_cameras) {
      seq.camera = static_cast<Camera>(s % 3);
      seq.scenario = (s % 2 == 0) ? Scenario::kStationary : Scenario::kMixedMotion;
    }
    const CameraProfile cam = config.tag_cameras ? kCameraProfile[s % 3] : CameraProfile{1.0, 1.0};
    const real motion = (seq.scenario == Scenario::kMixedMotion) ? 1.0 : 0.0;

    real hr0 = uhr(rng);
    if (config.hr_drift_bpm > 0.0) {
      const real half = config.hr_drift_bpm / 2.0;
      hr0 = std::min(std::max(hr0, config.hr_lo + half), config.hr_hi - half);
    }
    const real harm_phase = uphase(rng);
    const real drift_freq = 0.04 + 0.04 * std::generate_canonical<real, 53>(rng);  // Hz
    const real drift_phase = uphase(rng);
    const real hr_phase = uphase(rng);

    seq.signals = Tensor({kChannels, T});
    seq.ref_hr.resize(static_cast<size_t>(T));

    // reference HR trace and accumulated pulse phase
    std::vector<real> phase(static_cast<size_t>(T));
    real theta = 0.0;
    for (int t = 0; t < T; ++t) {
      real hr = hr0;
      if (config.hr_drift_bpm > 0.0)
        hr += (config.hr_drift_bpm / 2.0) *
              std::sin(2.0 * kPi * 0.01 * static_cast<real>(t) / kFps + hr_phase);
      seq.ref_hr[static_cast<size_t>(t)] = hr;
      phase[static_cast<size_t>(t)] = theta;
      theta += 2.0 * kPi * (hr / 60.0) / kFps;
    }

    for (int roi = 0; roi < 6; ++roi) {
      for (int col = 0; col < 3; ++col) {
        const int c = roi * 3 + col;
        std::uniform_real_distribution<real> ubase(80.0, 180.0);
        const real baseline = ubase(rng);
        const real a = cam.amp * kRoiFactor[roi] * kColorFactor[col];
        // pulse power of sin(th) + 0.3 sin(2 th + phi) is a^2 * (1+0.09)/2
        const real signal_power = a * a * 0.545;
        const real sigma =
            std::sqrt(signal_power * noise_power_scale) * cam.noise * (1.0 + 0.5 * motion);
        const real drift_amp = a * (0.5 + 1.0 * motion);
        real* ch = seq.signals.data() + static_cast<size_t>(c) * T;
        for (int t = 0; t < T; ++t) {
          const real th = phase[static_cast<size_t>(t)];
          real v = baseline + a * (std::sin(th) + 0.3 * std::sin(2.0 * th + harm_phase));
          v += drift_amp *
               std::sin(2.0 * kPi * drift_freq * static_cast<real>(t) / kFps + drift_phase);
          if (sigma > 0.0) v += sigma * gauss(rng);
          ch[t] = v;
        }
      }
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace pulsegrid
