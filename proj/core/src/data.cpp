#include "pulsegrid/data.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pulsegrid {

std::string camera_name(Camera c) {
  switch (c) {
    case Camera::kCam1: return "cam1";
    case Camera::kCam2: return "cam2";
    case Camera::kCam3: return "cam3";
    case Camera::kSynthetic: return "synthetic";
  }
  return "?";
}

Camera parse_camera(const std::string& name) {
  if (name == "cam1") return Camera::kCam1;
  if (name == "cam2") return Camera::kCam2;
  if (name == "cam3") return Camera::kCam3;
  if (name == "synthetic") return Camera::kSynthetic;
  throw std::invalid_argument("unknown camera '" + name +
                              "' (expected cam1, cam2, cam3 or synthetic)");
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::kStationary: return "stationary";
    case Scenario::kMixedMotion: return "mixed_motion";
    case Scenario::kSynthetic: return "synthetic";
  }
  return "?";
}

Scenario parse_scenario(const std::string& name) {
  if (name == "stationary") return Scenario::kStationary;
  if (name == "mixed_motion") return Scenario::kMixedMotion;
  if (name == "synthetic") return Scenario::kSynthetic;
  throw std::invalid_argument("unknown scenario '" + name +
                              "' (expected stationary, mixed_motion or synthetic)");
}

Tensor scale_sample(const Tensor& raw) {
  if (raw.rank() != 2 || raw.dim(0) != kChannels || raw.dim(1) != kWindowLen)
    throw std::invalid_argument("scale_sample expects [18,64], got " + raw.shape_str());
  Tensor out(raw.shape());
  for (int c = 0; c < kChannels; ++c) {
    const real* src = raw.data() + static_cast<size_t>(c) * kWindowLen;
    real* dst = out.data() + static_cast<size_t>(c) * kWindowLen;
    real lo = src[0], hi = src[0];
    for (int t = 1; t < kWindowLen; ++t) {
      lo = std::min(lo, src[t]);
      hi = std::max(hi, src[t]);
    }
    if (hi == lo) {
      for (int t = 0; t < kWindowLen; ++t) dst[t] = 0.0;
    } else {
      // (x-lo)/(hi-lo) hits 0 and 1 exactly, so the bounds are attained
      const real d = hi - lo;
      for (int t = 0; t < kWindowLen; ++t) dst[t] = 2.0 * ((src[t] - lo) / d) - 1.0;
    }
  }
  return out;
}

std::vector<SignalSample> window_sequence(const ColorSignalSequence& seq, const ClassGrid& grid,
                                          std::vector<std::string>* warnings) {
  if (seq.signals.rank() != 2 || seq.signals.dim(0) != kChannels)
    throw std::invalid_argument("sequence " + seq.id + " has signal shape " +
                                seq.signals.shape_str() + ", expected [18,T]");
  const int T = seq.signals.dim(1);
  if (static_cast<size_t>(T) != seq.ref_hr.size())
    throw std::invalid_argument("sequence " + seq.id + ": " + std::to_string(T) +
                                " frames vs " + std::to_string(seq.ref_hr.size()) +
                                " reference HR values");
  std::vector<SignalSample> out;
  if (T < kWindowLen) {
    if (warnings != nullptr)
      warnings->push_back("sequence " + seq.id + " has only " + std::to_string(T) +
                          " frames (< 64); no windows produced");
    return out;
  }
  for (int start = 0; start + kWindowLen <= T; start += kWindowStep) {
    Tensor raw({kChannels, kWindowLen});
    for (int c = 0; c < kChannels; ++c)
      for (int t = 0; t < kWindowLen; ++t) raw.at(c, t) = seq.signals.at(c, start + t);
    real hr = 0.0;
    for (int t = 0; t < kWindowLen; ++t) hr += seq.ref_hr[static_cast<size_t>(start + t)];
    hr /= static_cast<real>(kWindowLen);
    SignalSample s;
    s.window = scale_sample(raw);
    s.ref_hr_bpm = hr;
    s.label = grid.label_of(hr);
    s.origin = {seq.id, start};
    s.camera = seq.camera;
    s.scenario = seq.scenario;
    out.push_back(std::move(s));
  }
  return out;
}

namespace {
bool overlaps_train(const SignalSample& s, int train_count,
                    const std::vector<SignalSample>& windows) {
  const int lo = s.origin.start_frame, hi = lo + kWindowLen - 1;
  for (int i = 0; i < train_count; ++i) {
    const int tlo = windows[static_cast<size_t>(i)].origin.start_frame;
    const int thi = tlo + kWindowLen - 1;
    if (lo <= thi && tlo <= hi) return true;
  }
  return false;
}
}  // namespace

SplitSets split_sets(const std::vector<std::vector<SignalSample>>& per_sequence,
                     std::vector<std::string>* warnings) {
  SplitSets sets;
  for (const auto& windows : per_sequence) {
    const int n = static_cast<int>(windows.size());
    if (n == 0) continue;
    if (n < 10) {
      if (warnings != nullptr)
        warnings->push_back("sequence " + windows.front().origin.sequence_id + " has only " +
                            std::to_string(n) + " windows (< 10); assigned entirely to train");
      sets.train.insert(sets.train.end(), windows.begin(), windows.end());
      continue;
    }
    const int n_train = static_cast<int>(std::floor(0.7 * n));
    const int val_end = static_cast<int>(std::floor(0.8 * n));
    for (int i = 0; i < n_train; ++i) sets.train.push_back(windows[static_cast<size_t>(i)]);
    for (int i = n_train; i < n; ++i) {
      const SignalSample& s = windows[static_cast<size_t>(i)];
      if (overlaps_train(s, n_train, windows)) continue;
      (i < val_end ? sets.val : sets.test).push_back(s);
    }
  }
  return sets;
}

void augment_window(Tensor& window, std::mt19937_64& rng) {
  std::uniform_real_distribution<real> amp(5e-3, 5e-2);
  const real a = amp(rng);
  std::uniform_real_distribution<real> noise(-a, a);
  for (int64_t i = 0; i < window.numel(); ++i) window[i] += noise(rng);
}

SignalSample augment(const SignalSample& sample, std::mt19937_64& rng) {
  SignalSample out = sample;
  augment_window(out.window, rng);
  return out;
}

}  // namespace pulsegrid
