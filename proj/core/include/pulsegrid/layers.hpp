#pragma once

#include <random>

#include "pulsegrid/tensor.hpp"

namespace pulsegrid {

enum class Mode { kTrain, kEval };

// Every layer follows the same protocol: forward() caches whatever the
// matching backward() needs, backward() returns the input gradient and
// overwrites the layer's parameter gradients. One forward/backward pair
// per layer instance at a time (single-writer training contract).

// Valid-padding cross-correlation, stride 1. Input [B,Cin,H,W],
// output [B,Cout,H-kh+1,W-kw+1].
class Conv2d {
 public:
  Conv2d(int in_ch, int out_ch, int kh, int kw);

  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& dy);

  int in_channels() const { return in_ch_; }
  int out_channels() const { return out_ch_; }
  int kernel_h() const { return kh_; }
  int kernel_w() const { return kw_; }
  int64_t param_count() const { return weight.numel() + bias.numel(); }

  Tensor weight;  // [Cout,Cin,kh,kw]
  Tensor bias;    // [Cout]
  Tensor grad_weight;
  Tensor grad_bias;

 private:
  int in_ch_, out_ch_, kh_, kw_;
  Tensor x_;  // cached forward input
};

// Valid-padding 1D cross-correlation over [B,Cin,L] -> [B,Cout,L-k+1].
class Conv1d {
 public:
  Conv1d(int in_ch, int out_ch, int k);

  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& dy);

  int kernel() const { return k_; }
  int64_t param_count() const { return weight.numel() + bias.numel(); }

  Tensor weight;  // [Cout,Cin,k]
  Tensor bias;    // [Cout]
  Tensor grad_weight;
  Tensor grad_bias;

 private:
  int in_ch_, out_ch_, k_;
  Tensor x_;
};

// Affine map x·Wᵀ + b over [B,F] -> [B,G].
class Linear {
 public:
  Linear(int in_features, int out_features);

  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& dy);

  int in_features() const { return in_f_; }
  int out_features() const { return out_f_; }
  int64_t param_count() const { return weight.numel() + bias.numel(); }

  Tensor weight;  // [G,F]
  Tensor bias;    // [G]
  Tensor grad_weight;
  Tensor grad_bias;

 private:
  int in_f_, out_f_;
  Tensor x_;
};

// Batch normalization over axis 1. Handles [B,F] (per feature over B),
// [B,C,L] (per channel over B·L) and [B,C,H,W] (per channel over B·H·W).
// Train mode uses batch statistics (biased variance, eps inside the sqrt)
// and updates running stats with momentum; eval mode uses running stats.
// Running variance stores the unbiased estimate.
class BatchNorm {
 public:
  explicit BatchNorm(int features, real eps = 1e-5, real momentum = 0.1);

  Tensor forward(const Tensor& x, Mode mode, bool update_running = true);
  Tensor backward(const Tensor& dy);

  int features() const { return features_; }
  real eps() const { return eps_; }
  int64_t param_count() const { return gamma.numel() + beta.numel(); }

  Tensor gamma;  // scale, init 1
  Tensor beta;   // shift, init 0
  Tensor grad_gamma;
  Tensor grad_beta;
  Tensor running_mean;
  Tensor running_var;

 private:
  int features_;
  real eps_, momentum_;
  Mode mode_ = Mode::kTrain;
  int64_t reduce_n_ = 0;
  Tensor xhat_;     // cached normalized input (train backward)
  Tensor inv_std_;  // per feature, for whichever stats forward used
};

// max(x, 0); the subgradient at exactly 0 is 0.
class ReLU {
 public:
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& dy) const;

 private:
  Tensor x_;
};

// Inverted dropout: train mode zeroes each element with probability `rate`
// and scales survivors by 1/(1-rate); eval mode is the identity.
class Dropout {
 public:
  explicit Dropout(real rate);

  Tensor forward(const Tensor& x, Mode mode, std::mt19937_64& rng);
  Tensor backward(const Tensor& dy) const;

  real rate() const { return rate_; }

 private:
  real rate_;
  bool identity_ = true;
  Tensor mask_;  // survivor scale per element
};

}  // namespace pulsegrid
