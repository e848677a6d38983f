#include "pulsegrid/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pulsegrid {

std::string loss_kind_name(LossKind kind) {
  switch (kind) {
    case LossKind::kSE: return "se";
    case LossKind::kCE: return "ce";
    case LossKind::kCL: return "cl";
  }
  return "?";
}

LossKind parse_loss_kind(const std::string& name) {
  if (name == "se") return LossKind::kSE;
  if (name == "ce") return LossKind::kCE;
  if (name == "cl") return LossKind::kCL;
  throw std::invalid_argument("unknown loss '" + name + "' (expected se, ce or cl)");
}

int SmoothingSpec::window_indices(const ClassGrid& grid) const {
  const real w = window_bpm / grid.step();
  int odd = 2 * static_cast<int>(std::lround((w - 1.0) / 2.0)) + 1;
  return std::max(odd, 3);
}

std::vector<real> gaussian_kernel(const SmoothingSpec& spec, const ClassGrid& grid) {
  const int w = spec.window_indices(grid);
  const int r = (w - 1) / 2;
  const real sigma = spec.sigma_indices(grid);
  std::vector<real> k(static_cast<size_t>(w));
  for (int d = -r; d <= r; ++d)
    k[static_cast<size_t>(d + r)] = std::exp(-(static_cast<real>(d) * d) / (2.0 * sigma * sigma));
  return k;
}

std::vector<real> gaussian_smooth_normalize(const std::vector<real>& v,
                                            const SmoothingSpec& spec, const ClassGrid& grid) {
  const int n = static_cast<int>(v.size());
  if (n == 0) throw std::invalid_argument("gaussian_smooth_normalize: empty input");
  bool any_positive = false;
  for (real x : v) {
    if (x < 0)
      throw std::invalid_argument("gaussian_smooth_normalize: negative entry " +
                                  std::to_string(x));
    if (x > 0) any_positive = true;
  }
  if (!any_positive) throw std::invalid_argument("gaussian_smooth_normalize: all-zero input");

  const std::vector<real> k = gaussian_kernel(spec, grid);
  const int r = (static_cast<int>(k.size()) - 1) / 2;
  std::vector<real> out(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    real s = 0.0;
    for (int d = -r; d <= r; ++d) {
      const int j = i + d;
      if (j >= 0 && j < n) s += k[static_cast<size_t>(d + r)] * v[static_cast<size_t>(j)];
    }
    out[static_cast<size_t>(i)] = s;
  }
  real total = 0.0;
  for (real x : out) total += x;
  for (real& x : out) x /= total;
  return out;
}

ClassWeights class_weights(const std::vector<int>& train_labels, const ClassGrid& grid) {
  if (train_labels.empty()) throw std::invalid_argument("class_weights: no labels given");
  std::vector<int64_t> counts(static_cast<size_t>(grid.n_classes), 0);
  for (int y : train_labels) {
    if (y < 0 || y >= grid.n_classes)
      throw std::invalid_argument("class_weights: label " + std::to_string(y) +
                                  " outside [0," + std::to_string(grid.n_classes - 1) + "]");
    ++counts[static_cast<size_t>(y)];
  }
  std::vector<real> inv(static_cast<size_t>(grid.n_classes), 0.0);
  for (int i = 0; i < grid.n_classes; ++i)
    if (counts[static_cast<size_t>(i)] > 0)
      inv[static_cast<size_t>(i)] = 1.0 / static_cast<real>(counts[static_cast<size_t>(i)]);
  return ClassWeights{gaussian_smooth_normalize(inv, SmoothingSpec::for_class_weights(), grid)};
}

std::vector<real> smoothed_one_hot(int y, const ClassGrid& grid) {
  if (y < 0 || y >= grid.n_classes)
    throw std::invalid_argument("smoothed_one_hot: label " + std::to_string(y) + " outside [0," +
                                std::to_string(grid.n_classes - 1) + "]");
  std::vector<real> v(static_cast<size_t>(grid.n_classes), 0.0);
  v[static_cast<size_t>(y)] = 1.0;
  return gaussian_smooth_normalize(v, SmoothingSpec::for_one_hot(), grid);
}

SmoothedTargets::SmoothedTargets(const ClassGrid& grid) {
  rows_.reserve(static_cast<size_t>(grid.n_classes));
  for (int y = 0; y < grid.n_classes; ++y) rows_.push_back(smoothed_one_hot(y, grid));
}

real se_loss(real yhat, real y) { return (yhat - y) * (yhat - y); }

real se_loss_grad(real yhat, real y) { return 2.0 * (yhat - y); }

real log_sum_exp(const real* logits, int n) {
  real m = logits[0];
  for (int i = 1; i < n; ++i) m = std::max(m, logits[i]);
  real s = 0.0;
  for (int i = 0; i < n; ++i) s += std::exp(logits[i] - m);
  return m + std::log(s);
}

real ce_loss(const std::vector<real>& logits, int y, const ClassWeights& w) {
  const int n = static_cast<int>(logits.size());
  if (y < 0 || y >= n)
    throw std::invalid_argument("ce_loss: label " + std::to_string(y) + " outside [0," +
                                std::to_string(n - 1) + "]");
  return w[y] * (-logits[static_cast<size_t>(y)] + log_sum_exp(logits.data(), n));
}

real cl_loss(const std::vector<real>& logits, int y, const ClassWeights& w, real alpha,
             bool softmax_mse, const ClassGrid& grid) {
  const int n = static_cast<int>(logits.size());
  const std::vector<real> target = smoothed_one_hot(y, grid);
  real mse = 0.0;
  if (softmax_mse) {
    const real lse = log_sum_exp(logits.data(), n);
    for (int i = 0; i < n; ++i) {
      const real p = std::exp(logits[static_cast<size_t>(i)] - lse);
      mse += (p - target[static_cast<size_t>(i)]) * (p - target[static_cast<size_t>(i)]);
    }
  } else {
    for (int i = 0; i < n; ++i)
      mse += (logits[static_cast<size_t>(i)] - target[static_cast<size_t>(i)]) *
             (logits[static_cast<size_t>(i)] - target[static_cast<size_t>(i)]);
  }
  mse /= static_cast<real>(n);
  return ce_loss(logits, y, w) + alpha * mse;
}

LossResult se_batch(const Tensor& yhat, const std::vector<real>& y_bpm) {
  if (yhat.rank() != 2 || yhat.dim(1) != 1)
    throw std::invalid_argument("se_batch expects [B,1] output, got " + yhat.shape_str());
  const int B = yhat.dim(0);
  if (static_cast<size_t>(B) != y_bpm.size())
    throw std::invalid_argument("se_batch: " + std::to_string(B) + " outputs vs " +
                                std::to_string(y_bpm.size()) + " references");
  LossResult r;
  r.grad = Tensor(yhat.shape());
  for (int b = 0; b < B; ++b) {
    const real d = yhat[b] - y_bpm[static_cast<size_t>(b)];
    r.value += d * d;
    r.grad[b] = 2.0 * d / static_cast<real>(B);
  }
  r.value /= static_cast<real>(B);
  return r;
}

namespace {
void check_batch_labels(const Tensor& logits, const std::vector<int>& y,
                        const ClassWeights& w, const char* who) {
  if (logits.rank() != 2)
    throw std::invalid_argument(std::string(who) + " expects [B,C] logits, got " +
                                logits.shape_str());
  const int C = logits.dim(1);
  if (C != w.size())
    throw std::invalid_argument(std::string(who) + ": " + std::to_string(C) +
                                " classes vs " + std::to_string(w.size()) + " weights");
  if (static_cast<size_t>(logits.dim(0)) != y.size())
    throw std::invalid_argument(std::string(who) + ": " + std::to_string(logits.dim(0)) +
                                " outputs vs " + std::to_string(y.size()) + " labels");
  for (int label : y)
    if (label < 0 || label >= C)
      throw std::invalid_argument(std::string(who) + ": label " + std::to_string(label) +
                                  " outside [0," + std::to_string(C - 1) + "]");
}
}  // namespace

LossResult ce_batch(const Tensor& logits, const std::vector<int>& y, const ClassWeights& w) {
  check_batch_labels(logits, y, w, "ce_batch");
  const int B = logits.dim(0), C = logits.dim(1);
  LossResult r;
  r.grad = Tensor(logits.shape());
  for (int b = 0; b < B; ++b) {
    const real* row = logits.data() + static_cast<size_t>(b) * C;
    real* grow = r.grad.data() + static_cast<size_t>(b) * C;
    const int label = y[static_cast<size_t>(b)];
    const real wy = w[label];
    const real lse = log_sum_exp(row, C);
    r.value += wy * (-row[label] + lse);
    for (int i = 0; i < C; ++i) {
      const real p = std::exp(row[i] - lse);
      grow[i] = wy * (p - (i == label ? 1.0 : 0.0)) / static_cast<real>(B);
    }
  }
  r.value /= static_cast<real>(B);
  return r;
}

LossResult cl_batch(const Tensor& logits, const std::vector<int>& y, const ClassWeights& w,
                    const SmoothedTargets& targets, real alpha, bool softmax_mse) {
  check_batch_labels(logits, y, w, "cl_batch");
  const int B = logits.dim(0), C = logits.dim(1);
  if (targets.n_classes() != C)
    throw std::invalid_argument("cl_batch: " + std::to_string(C) + " classes vs " +
                                std::to_string(targets.n_classes()) + " smoothed targets");
  LossResult r = ce_batch(logits, y, w);
  const real scale = alpha / static_cast<real>(C);
  for (int b = 0; b < B; ++b) {
    const real* row = logits.data() + static_cast<size_t>(b) * C;
    real* grow = r.grad.data() + static_cast<size_t>(b) * C;
    const std::vector<real>& t = targets.row(y[static_cast<size_t>(b)]);
    if (softmax_mse) {
      const real lse = log_sum_exp(row, C);
      std::vector<real> p(static_cast<size_t>(C));
      real mse = 0.0, dot = 0.0;
      for (int i = 0; i < C; ++i) {
        p[static_cast<size_t>(i)] = std::exp(row[i] - lse);
        const real d = p[static_cast<size_t>(i)] - t[static_cast<size_t>(i)];
        mse += d * d;
        dot += d * p[static_cast<size_t>(i)];
      }
      r.value += scale * mse / static_cast<real>(B);
      for (int i = 0; i < C; ++i) {
        const real d = p[static_cast<size_t>(i)] - t[static_cast<size_t>(i)];
        grow[i] += 2.0 * scale * p[static_cast<size_t>(i)] * (d - dot) / static_cast<real>(B);
      }
    } else {
      real mse = 0.0;
      for (int i = 0; i < C; ++i) {
        const real d = row[i] - t[static_cast<size_t>(i)];
        mse += d * d;
        grow[i] += 2.0 * scale * d / static_cast<real>(B);
      }
      r.value += scale * mse / static_cast<real>(B);
    }
  }
  return r;
}

}  // namespace pulsegrid
