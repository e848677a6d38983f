#pragma once

#include <random>
#include <string>
#include <vector>

#include "pulsegrid/class_grid.hpp"
#include "pulsegrid/tensor.hpp"

namespace pulsegrid {

constexpr int kChannels = 18;    // 6 ROIs x RGB
constexpr int kWindowLen = 64;   // frames per sample
constexpr int kWindowStep = 10;  // frames between window starts
constexpr int kFps = 15;

enum class Camera { kCam1, kCam2, kCam3, kSynthetic };
enum class Scenario { kStationary, kMixedMotion, kSynthetic };

std::string camera_name(Camera c);
Camera parse_camera(const std::string& name);  // "cam1" | "cam2" | "cam3" | "synthetic"
std::string scenario_name(Scenario s);
Scenario parse_scenario(const std::string& name);  // "stationary" | "mixed_motion" | "synthetic"

struct ColorSignalSequence {
  std::string id;
  Camera camera = Camera::kSynthetic;
  Scenario scenario = Scenario::kSynthetic;
  int fps = kFps;
  Tensor signals;            // [18, T], channel order roi1_r, roi1_g, roi1_b, ..., roi6_b
  std::vector<real> ref_hr;  // T values, bpm, all inside [40,125]
};

struct SampleOrigin {
  std::string sequence_id;
  int start_frame = 0;
};

struct SignalSample {
  Tensor window;  // [18,64], per-channel scaled to [-1,1]
  real ref_hr_bpm = 0.0;
  int label = 0;
  SampleOrigin origin;
  Camera camera = Camera::kSynthetic;
  Scenario scenario = Scenario::kSynthetic;
};

struct SplitSets {
  std::vector<SignalSample> train, val, test;
};

// Per-channel min-max map onto [-1,1]; a constant channel maps to zeros.
Tensor scale_sample(const Tensor& raw);

// Windows start at 0, 10, 20, ... while start+64 <= T. Reference HR is the
// window mean; the label comes from the grid. T < 64 yields no windows plus
// a warning.
std::vector<SignalSample> window_sequence(const ColorSignalSequence& seq,
                                          const ClassGrid& grid = {},
                                          std::vector<std::string>* warnings = nullptr);

// Per sequence: first 70% of windows train, [70%,80%) val candidates,
// [80%,100%) test candidates; any candidate whose frame range intersects a
// train window of the same sequence is dropped, so train/val and train/test
// stay frame-disjoint. Sequences under 10 windows go entirely to train with
// a warning.
SplitSets split_sets(const std::vector<std::vector<SignalSample>>& per_sequence,
                     std::vector<std::string>* warnings = nullptr);

// Train-time noise: A ~ U[5e-3, 5e-2] drawn once per sample per step, then
// elementwise U[-A, A] added to the scaled window; no re-clipping.
void augment_window(Tensor& window, std::mt19937_64& rng);
SignalSample augment(const SignalSample& sample, std::mt19937_64& rng);

}  // namespace pulsegrid
