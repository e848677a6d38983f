#pragma once

#include <string>
#include <vector>

#include "pulsegrid/class_grid.hpp"
#include "pulsegrid/tensor.hpp"

namespace pulsegrid {

enum class LossKind { kSE, kCE, kCL };

std::string loss_kind_name(LossKind kind);
LossKind parse_loss_kind(const std::string& name);  // "se" | "ce" | "cl"

// Gaussian smoothing parameters, stated in bpm and converted to class-index
// units through the grid step. The index window is the nearest odd integer
// (never below 3).
struct SmoothingSpec {
  real window_bpm = 13.0;
  real sigma_bpm = 13.0 / 3.0;

  int window_indices(const ClassGrid& grid) const;
  real sigma_indices(const ClassGrid& grid) const { return sigma_bpm / grid.step(); }

  static SmoothingSpec for_class_weights() { return {13.0, 13.0 / 3.0}; }
  static SmoothingSpec for_one_hot() { return {13.0, 13.0 / 6.0}; }
};

// Gaussian sampled at integer offsets -r..r (unnormalized; the smoothing
// result is normalized globally, so kernel scale cancels).
std::vector<real> gaussian_kernel(const SmoothingSpec& spec, const ClassGrid& grid);

// Same-padding (zero-extension) convolution with the sampled Gaussian,
// then global division by the result's sum. Output sums to 1; entries near
// the edges carry less mass than interior ones.
std::vector<real> gaussian_smooth_normalize(const std::vector<real>& v,
                                            const SmoothingSpec& spec, const ClassGrid& grid);

// Per-class weights: inverse counts (0 for absent classes) smoothed and
// normalized to sum 1.
struct ClassWeights {
  std::vector<real> w;

  real operator[](int label) const { return w[static_cast<size_t>(label)]; }
  int size() const { return static_cast<int>(w.size()); }
};

ClassWeights class_weights(const std::vector<int>& train_labels, const ClassGrid& grid = {});

std::vector<real> smoothed_one_hot(int y, const ClassGrid& grid = {});

// All 128 smoothed one-hot rows, precomputed once per training run.
class SmoothedTargets {
 public:
  explicit SmoothedTargets(const ClassGrid& grid = {});

  const std::vector<real>& row(int y) const { return rows_[static_cast<size_t>(y)]; }
  int n_classes() const { return static_cast<int>(rows_.size()); }

 private:
  std::vector<std::vector<real>> rows_;
};

// --- single-sample forms -------------------------------------------------

real se_loss(real yhat, real y);
real se_loss_grad(real yhat, real y);

real log_sum_exp(const real* logits, int n);

real ce_loss(const std::vector<real>& logits, int y, const ClassWeights& w);

real cl_loss(const std::vector<real>& logits, int y, const ClassWeights& w, real alpha = 25.0,
             bool softmax_mse = false, const ClassGrid& grid = {});

// --- batch forms (mean over samples, gradient wrt the model output) ------

struct LossResult {
  real value = 0.0;
  Tensor grad;  // same shape as the model output fed in
};

// yhat: [B,1] regression output, y_bpm: B reference values
LossResult se_batch(const Tensor& yhat, const std::vector<real>& y_bpm);

// logits: [B,C]
LossResult ce_batch(const Tensor& logits, const std::vector<int>& y, const ClassWeights& w);

LossResult cl_batch(const Tensor& logits, const std::vector<int>& y, const ClassWeights& w,
                    const SmoothedTargets& targets, real alpha = 25.0,
                    bool softmax_mse = false);

}  // namespace pulsegrid
