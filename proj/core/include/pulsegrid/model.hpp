#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pulsegrid/class_grid.hpp"
#include "pulsegrid/layers.hpp"

namespace pulsegrid {

enum class Task { kRegression, kClassification };

std::string task_name(Task task);
Task parse_task(const std::string& name);  // "regression" | "classification"

// Architecture selector. fc_out is tied to (task, with_filter):
// regression -> 1, classification -> 128, classification + filter -> 134.
struct ModelSpec {
  Task task = Task::kClassification;
  bool with_filter = false;
  int conv_channels = 16;
  int fc_hidden = 60;
  int fc_out = 128;
  real dropout = 0.5;
  int n_classes = 128;

  void validate() const;  // throws on violated invariants

  static ModelSpec regression();
  static ModelSpec classification(bool with_filter);
};

struct TraceEntry {
  std::string stage;
  std::vector<int> shape;
};

struct NamedGrad {
  std::string name;
  Tensor* value;
  Tensor* grad;
};

struct Prediction {
  std::vector<real> hr;     // bpm per sample
  std::vector<int> labels;  // classification only; empty for regression
};

// The full network: five conv blocks (conv -> ReLU -> BN), two FC blocks
// (fc1 -> ReLU -> BN -> dropout, fc2 -> BN -> dropout; no ReLU on the head),
// and optionally the three-block 1D filtering stack (conv -> ReLU -> BN)
// mapping length 134 -> 132 -> 130 -> 128.
class Model {
 public:
  Model(ModelSpec spec, uint64_t seed);

  // Input [B,1,18,64]. Output [B,1], [B,128] (raw logits) depending on spec.
  // Train-mode stochasticity is confined to dropout, driven by the internal
  // stream (reseedable for replay).
  Tensor forward(const Tensor& batch, Mode mode);
  Tensor backward(const Tensor& d_out);

  Prediction predict(const Tensor& batch);

  int64_t param_count() const;

  // Trainable parameters in a fixed order (the checkpoint/optimizer order).
  std::vector<NamedGrad> trainable();
  // Trainable parameters plus BN running stats, for serialization.
  std::vector<std::pair<std::string, Tensor*>> state();
  std::vector<std::pair<std::string, const Tensor*>> state() const;

  const ModelSpec& spec() const { return spec_; }
  uint64_t seed() const { return seed_; }
  const std::vector<TraceEntry>& trace() const { return trace_; }

  void reseed_dropout(uint64_t seed) { dropout_rng_.seed(seed); }

 private:
  ModelSpec spec_;
  uint64_t seed_;
  std::mt19937_64 dropout_rng_;
  std::vector<TraceEntry> trace_;
  int last_batch_ = 0;

  Conv2d conv1_, conv2_, conv3_, conv4_, conv5_;
  BatchNorm bn1_, bn2_, bn3_, bn4_, bn5_;
  ReLU relu1_, relu2_, relu3_, relu4_, relu5_, relu_fc1_;
  Linear fc1_, fc2_;
  BatchNorm bn_fc1_, bn_fc2_;
  Dropout drop1_, drop2_;

  // filtering stack (constructed always, used only when with_filter)
  Conv1d fconv1_, fconv2_, fconv3_;
  BatchNorm fbn1_, fbn2_, fbn3_;
  ReLU frelu1_, frelu2_, frelu3_;
};

// argmax per row, lowest index wins ties
int argmax_row(const real* row, int n);

}  // namespace pulsegrid
