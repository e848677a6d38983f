#include "pulsegrid/layers.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace pulsegrid {

namespace {

// ---------------------------------------------------------------------------
// Convolution kernels. All loops accumulate in a fixed order, so results are
// identical for any worker count. The kernel width is a template parameter
// for the hot sizes so the inner stencil unrolls and vectorizes.
// ---------------------------------------------------------------------------

template <int KW>
void conv_fwd_one(const real* in, const real* w, const real* bias, real* out, int Cin, int H,
                  int W, int Cout, int kh) {
  const int OH = H - kh + 1, OW = W - KW + 1;
  for (int co = 0; co < Cout; ++co) {
    real* oplane = out + static_cast<size_t>(co) * OH * OW;
    for (int i = 0; i < OH * OW; ++i) oplane[i] = bias[co];
    for (int ci = 0; ci < Cin; ++ci) {
      const real* iplane = in + static_cast<size_t>(ci) * H * W;
      for (int ky = 0; ky < kh; ++ky) {
        const real* wrow = w + ((static_cast<size_t>(co) * Cin + ci) * kh + ky) * KW;
        for (int y = 0; y < OH; ++y) {
          const real* irow = iplane + (y + ky) * W;
          real* orow = oplane + y * OW;
          for (int x = 0; x < OW; ++x) {
            real s = 0;
#pragma GCC unroll 16
            for (int kx = 0; kx < KW; ++kx) s += wrow[kx] * irow[x + kx];
            orow[x] += s;
          }
        }
      }
    }
  }
}

// din = full correlation of zero-padded dy with the flipped kernel; same
// stencil shape as the forward pass.
template <int KW>
void conv_bwd_input_one(const real* dy, const real* w, real* din, real* dyp, int Cin, int H,
                        int W, int Cout, int kh) {
  const int OH = H - kh + 1, OW = W - KW + 1;
  const int PH = OH + 2 * (kh - 1), PW = OW + 2 * (KW - 1);
  std::memset(dyp, 0, sizeof(real) * static_cast<size_t>(Cout) * PH * PW);
  for (int co = 0; co < Cout; ++co)
    for (int y = 0; y < OH; ++y)
      std::memcpy(dyp + (static_cast<size_t>(co) * PH + y + kh - 1) * PW + (KW - 1),
                  dy + (static_cast<size_t>(co) * OH + y) * OW, sizeof(real) * OW);
  std::memset(din, 0, sizeof(real) * static_cast<size_t>(Cin) * H * W);
  for (int ci = 0; ci < Cin; ++ci) {
    real* dplane = din + static_cast<size_t>(ci) * H * W;
    for (int co = 0; co < Cout; ++co) {
      const real* pplane = dyp + static_cast<size_t>(co) * PH * PW;
      for (int ky = 0; ky < kh; ++ky) {
        real wflip[KW];
        const real* wrow = w + ((static_cast<size_t>(co) * Cin + ci) * kh + (kh - 1 - ky)) * KW;
        for (int kx = 0; kx < KW; ++kx) wflip[kx] = wrow[KW - 1 - kx];
        for (int y = 0; y < H; ++y) {
          const real* prow = pplane + (y + ky) * PW;
          real* drow = dplane + y * W;
          for (int x = 0; x < W; ++x) {
            real s = 0;
#pragma GCC unroll 16
            for (int kx = 0; kx < KW; ++kx) s += wflip[kx] * prow[x + kx];
            drow[x] += s;
          }
        }
      }
    }
  }
}

// dw for one (sample, output channel): pad dy rows out to the input row
// stride, then every weight gradient is one contiguous dot product.
template <int KW>
void conv_bwd_weight_one(const real* in, const real* dy_co, real* dw_co, real* dys, int Cin,
                         int H, int W, int kh) {
  const int OH = H - kh + 1, OW = W - KW + 1;
  const int N = (OH - 1) * W + OW;
  std::memset(dys, 0, sizeof(real) * static_cast<size_t>(OH) * W);
  for (int y = 0; y < OH; ++y)
    std::memcpy(dys + static_cast<size_t>(y) * W, dy_co + static_cast<size_t>(y) * OW,
                sizeof(real) * OW);
  for (int ci = 0; ci < Cin; ++ci) {
    const real* iplane = in + static_cast<size_t>(ci) * H * W;
    for (int ky = 0; ky < kh; ++ky)
      for (int kx = 0; kx < KW; ++kx) {
        const real* b = iplane + ky * W + kx;
        real s = 0;
#pragma omp simd reduction(+ : s)
        for (int i = 0; i < N; ++i) s += dys[i] * b[i];
        dw_co[(static_cast<size_t>(ci) * kh + ky) * KW + kx] += s;
      }
  }
}

struct ConvDims {
  int B, Cin, H, W, Cout, kh, kw;
  int oh() const { return H - kh + 1; }
  int ow() const { return W - kw + 1; }
};

template <int KW>
void conv_fwd_batch_t(const ConvDims& d, const real* in, const real* w, const real* bias,
                      real* out) {
  const size_t in_sz = static_cast<size_t>(d.Cin) * d.H * d.W;
  const size_t out_sz = static_cast<size_t>(d.Cout) * d.oh() * d.ow();
#pragma omp parallel for schedule(static)
  for (int b = 0; b < d.B; ++b)
    conv_fwd_one<KW>(in + b * in_sz, w, bias, out + b * out_sz, d.Cin, d.H, d.W, d.Cout, d.kh);
}

template <int KW>
void conv_bwd_input_batch_t(const ConvDims& d, const real* dy, const real* w, real* din) {
  const size_t in_sz = static_cast<size_t>(d.Cin) * d.H * d.W;
  const size_t out_sz = static_cast<size_t>(d.Cout) * d.oh() * d.ow();
  const size_t pad_sz =
      static_cast<size_t>(d.Cout) * (d.oh() + 2 * (d.kh - 1)) * (d.ow() + 2 * (KW - 1));
#pragma omp parallel for schedule(static)
  for (int b = 0; b < d.B; ++b) {
    std::vector<real> dyp(pad_sz);
    conv_bwd_input_one<KW>(dy + b * out_sz, w, din + b * in_sz, dyp.data(), d.Cin, d.H, d.W,
                           d.Cout, d.kh);
  }
}

template <int KW>
void conv_bwd_params_batch_t(const ConvDims& d, const real* in, const real* dy, real* dw,
                             real* db) {
  const size_t in_sz = static_cast<size_t>(d.Cin) * d.H * d.W;
  const size_t out_sz = static_cast<size_t>(d.Cout) * d.oh() * d.ow();
  const int plane = d.oh() * d.ow();
  const size_t w_co = static_cast<size_t>(d.Cin) * d.kh * KW;
#pragma omp parallel for schedule(static)
  for (int co = 0; co < d.Cout; ++co) {
    std::vector<real> dys(static_cast<size_t>(d.oh()) * d.W);
    real bsum = 0;
    for (int b = 0; b < d.B; ++b) {
      const real* dy_co = dy + b * out_sz + static_cast<size_t>(co) * plane;
      conv_bwd_weight_one<KW>(in + b * in_sz, dy_co, dw + co * w_co, dys.data(), d.Cin, d.H,
                              d.W, d.kh);
      for (int i = 0; i < plane; ++i) bsum += dy_co[i];
    }
    db[co] += bsum;
  }
}

// runtime-width fallbacks for shapes outside the production set
void conv_fwd_batch_g(const ConvDims& d, const real* in, const real* w, const real* bias,
                      real* out) {
  const int OH = d.oh(), OW = d.ow();
  const size_t in_sz = static_cast<size_t>(d.Cin) * d.H * d.W;
  const size_t out_sz = static_cast<size_t>(d.Cout) * OH * OW;
  for (int b = 0; b < d.B; ++b)
    for (int co = 0; co < d.Cout; ++co) {
      real* oplane = out + b * out_sz + static_cast<size_t>(co) * OH * OW;
      for (int i = 0; i < OH * OW; ++i) oplane[i] = bias[co];
      for (int ci = 0; ci < d.Cin; ++ci)
        for (int ky = 0; ky < d.kh; ++ky) {
          const real* wrow = w + ((static_cast<size_t>(co) * d.Cin + ci) * d.kh + ky) * d.kw;
          for (int y = 0; y < OH; ++y) {
            const real* irow = in + b * in_sz + (static_cast<size_t>(ci) * d.H + y + ky) * d.W;
            real* orow = oplane + y * OW;
            for (int x = 0; x < OW; ++x) {
              real s = 0;
              for (int kx = 0; kx < d.kw; ++kx) s += wrow[kx] * irow[x + kx];
              orow[x] += s;
            }
          }
        }
    }
}

void conv_bwd_input_batch_g(const ConvDims& d, const real* dy, const real* w, real* din) {
  const int OH = d.oh(), OW = d.ow();
  const size_t in_sz = static_cast<size_t>(d.Cin) * d.H * d.W;
  const size_t out_sz = static_cast<size_t>(d.Cout) * OH * OW;
  std::memset(din, 0, sizeof(real) * d.B * in_sz);
  for (int b = 0; b < d.B; ++b)
    for (int co = 0; co < d.Cout; ++co)
      for (int ci = 0; ci < d.Cin; ++ci)
        for (int ky = 0; ky < d.kh; ++ky)
          for (int kx = 0; kx < d.kw; ++kx) {
            const real wv = w[((static_cast<size_t>(co) * d.Cin + ci) * d.kh + ky) * d.kw + kx];
            for (int y = 0; y < OH; ++y) {
              const real* dorow = dy + b * out_sz + (static_cast<size_t>(co) * OH + y) * OW;
              real* dirow = din + b * in_sz + (static_cast<size_t>(ci) * d.H + y + ky) * d.W + kx;
              for (int x = 0; x < OW; ++x) dirow[x] += wv * dorow[x];
            }
          }
}

void conv_bwd_params_batch_g(const ConvDims& d, const real* in, const real* dy, real* dw,
                             real* db) {
  const int OH = d.oh(), OW = d.ow();
  const size_t in_sz = static_cast<size_t>(d.Cin) * d.H * d.W;
  const size_t out_sz = static_cast<size_t>(d.Cout) * OH * OW;
  for (int b = 0; b < d.B; ++b)
    for (int co = 0; co < d.Cout; ++co) {
      const real* dy_co = dy + b * out_sz + static_cast<size_t>(co) * OH * OW;
      for (int ci = 0; ci < d.Cin; ++ci)
        for (int ky = 0; ky < d.kh; ++ky)
          for (int kx = 0; kx < d.kw; ++kx) {
            real s = 0;
            for (int y = 0; y < OH; ++y) {
              const real* irow =
                  in + b * in_sz + (static_cast<size_t>(ci) * d.H + y + ky) * d.W + kx;
              const real* dorow = dy_co + static_cast<size_t>(y) * OW;
              for (int x = 0; x < OW; ++x) s += irow[x] * dorow[x];
            }
            dw[((static_cast<size_t>(co) * d.Cin + ci) * d.kh + ky) * d.kw + kx] += s;
          }
      real bsum = 0;
      for (int i = 0; i < OH * OW; ++i) bsum += dy_co[i];
      db[co] += bsum;
    }
}

void conv_fwd_batch(const ConvDims& d, const real* in, const real* w, const real* bias,
                    real* out) {
  switch (d.kw) {
    case 11: conv_fwd_batch_t<11>(d, in, w, bias, out); break;
    case 3: conv_fwd_batch_t<3>(d, in, w, bias, out); break;
    default: conv_fwd_batch_g(d, in, w, bias, out); break;
  }
}

void conv_bwd_input_batch(const ConvDims& d, const real* dy, const real* w, real* din) {
  switch (d.kw) {
    case 11: conv_bwd_input_batch_t<11>(d, dy, w, din); break;
    case 3: conv_bwd_input_batch_t<3>(d, dy, w, din); break;
    default: conv_bwd_input_batch_g(d, dy, w, din); break;
  }
}

void conv_bwd_params_batch(const ConvDims& d, const real* in, const real* dy, real* dw,
                           real* db) {
  switch (d.kw) {
    case 11: conv_bwd_params_batch_t<11>(d, in, dy, dw, db); break;
    case 3: conv_bwd_params_batch_t<3>(d, in, dy, dw, db); break;
    default: conv_bwd_params_batch_g(d, in, dy, dw, db); break;
  }
}

void check_positive(int v, const char* what) {
  if (v <= 0) throw std::invalid_argument(std::string(what) + " must be positive, got " +
                                          std::to_string(v));
}

}  // namespace

// ---------------------------------------------------------------------------
// Conv2d
// ---------------------------------------------------------------------------

Conv2d::Conv2d(int in_ch, int out_ch, int kh, int kw)
    : in_ch_(in_ch), out_ch_(out_ch), kh_(kh), kw_(kw) {
  check_positive(in_ch, "in_channels");
  check_positive(out_ch, "out_channels");
  check_positive(kh, "kernel height");
  check_positive(kw, "kernel width");
  weight = Tensor::zeros({out_ch, in_ch, kh, kw});
  bias = Tensor::zeros({out_ch});
  grad_weight = Tensor::zeros({out_ch, in_ch, kh, kw});
  grad_bias = Tensor::zeros({out_ch});
}

Tensor Conv2d::forward(const Tensor& x) {
  if (x.rank() != 4 || x.dim(1) != in_ch_)
    throw std::invalid_argument("conv2d expects [B," + std::to_string(in_ch_) +
                                ",H,W] input, got " + x.shape_str());
  const int H = x.dim(2), W = x.dim(3);
  if (H < kh_ || W < kw_)
    throw std::invalid_argument("conv2d input " + x.shape_str() + " smaller than kernel " +
                                std::to_string(kh_) + "x" + std::to_string(kw_));
  x_ = x;
  ConvDims d{x.dim(0), in_ch_, H, W, out_ch_, kh_, kw_};
  Tensor y({d.B, out_ch_, d.oh(), d.ow()});
  conv_fwd_batch(d, x.data(), weight.data(), bias.data(), y.data());
  return y;
}

Tensor Conv2d::backward(const Tensor& dy) {
  if (x_.empty()) throw std::logic_error("conv2d backward before forward");
  ConvDims d{x_.dim(0), in_ch_, x_.dim(2), x_.dim(3), out_ch_, kh_, kw_};
  if (dy.rank() != 4 || dy.dim(0) != d.B || dy.dim(1) != out_ch_ || dy.dim(2) != d.oh() ||
      dy.dim(3) != d.ow())
    throw std::invalid_argument("conv2d backward expects gradient of shape [" +
                                std::to_string(d.B) + "," + std::to_string(out_ch_) + "," +
                                std::to_string(d.oh()) + "," + std::to_string(d.ow()) +
                                "], got " + dy.shape_str());
  grad_weight.zero();
  grad_bias.zero();
  Tensor dx(x_.shape());
  conv_bwd_input_batch(d, dy.data(), weight.data(), dx.data());
  conv_bwd_params_batch(d, x_.data(), dy.data(), grad_weight.data(), grad_bias.data());
  return dx;
}

// ---------------------------------------------------------------------------
// Conv1d: same kernels with a singleton spatial row
// ---------------------------------------------------------------------------

Conv1d::Conv1d(int in_ch, int out_ch, int k) : in_ch_(in_ch), out_ch_(out_ch), k_(k) {
  check_positive(in_ch, "in_channels");
  check_positive(out_ch, "out_channels");
  check_positive(k, "kernel size");
  weight = Tensor::zeros({out_ch, in_ch, k});
  bias = Tensor::zeros({out_ch});
  grad_weight = Tensor::zeros({out_ch, in_ch, k});
  grad_bias = Tensor::zeros({out_ch});
}

Tensor Conv1d::forward(const Tensor& x) {
  if (x.rank() != 3 || x.dim(1) != in_ch_)
    throw std::invalid_argument("conv1d expects [B," + std::to_string(in_ch_) +
                                ",L] input, got " + x.shape_str());
  const int L = x.dim(2);
  if (L < k_)
    throw std::invalid_argument("conv1d input length " + std::to_string(L) +
                                " smaller than kernel " + std::to_string(k_));
  x_ = x;
  ConvDims d{x.dim(0), in_ch_, 1, L, out_ch_, 1, k_};
  Tensor y({d.B, out_ch_, d.ow()});
  conv_fwd_batch(d, x.data(), weight.data(), bias.data(), y.data());
  return y;
}

Tensor Conv1d::backward(const Tensor& dy) {
  if (x_.empty()) throw std::logic_error("conv1d backward before forward");
  ConvDims d{x_.dim(0), in_ch_, 1, x_.dim(2), out_ch_, 1, k_};
  if (dy.rank() != 3 || dy.dim(0) != d.B || dy.dim(1) != out_ch_ || dy.dim(2) != d.ow())
    throw std::invalid_argument("conv1d backward expects gradient of shape [" +
                                std::to_string(d.B) + "," + std::to_string(out_ch_) + "," +
                                std::to_string(d.ow()) + "], got " + dy.shape_str());
  grad_weight.zero();
  grad_bias.zero();
  Tensor dx(x_.shape());
  conv_bwd_input_batch(d, dy.data(), weight.data(), dx.data());
  conv_bwd_params_batch(d, x_.data(), dy.data(), grad_weight.data(), grad_bias.data());
  return dx;
}

// ---------------------------------------------------------------------------
// Linear
// ---------------------------------------------------------------------------

Linear::Linear(int in_features, int out_features) : in_f_(in_features), out_f_(out_features) {
  check_positive(in_features, "in_features");
  check_positive(out_features, "out_features");
  weight = Tensor::zeros({out_features, in_features});
  bias = Tensor::zeros({out_features});
  grad_weight = Tensor::zeros({out_features, in_features});
  grad_bias = Tensor::zeros({out_features});
}

Tensor Linear::forward(const Tensor& x) {
  if (x.rank() != 2 || x.dim(1) != in_f_)
    throw std::invalid_argument("linear expects [B," + std::to_string(in_f_) + "] input, got " +
                                x.shape_str());
  x_ = x;
  const int B = x.dim(0);
  Tensor y({B, out_f_});
#pragma omp parallel for schedule(static)
  for (int b = 0; b < B; ++b) {
    const real* xrow = x.data() + static_cast<size_t>(b) * in_f_;
    real* yrow = y.data() + static_cast<size_t>(b) * out_f_;
    for (int g = 0; g < out_f_; ++g) {
      const real* wrow = weight.data() + static_cast<size_t>(g) * in_f_;
      real s = 0;
#pragma omp simd reduction(+ : s)
      for (int f = 0; f < in_f_; ++f) s += wrow[f] * xrow[f];
      yrow[g] = s + bias[g];
    }
  }
  return y;
}

Tensor Linear::backward(const Tensor& dy) {
  if (x_.empty()) throw std::logic_error("linear backward before forward");
  const int B = x_.dim(0);
  if (dy.rank() != 2 || dy.dim(0) != B || dy.dim(1) != out_f_)
    throw std::invalid_argument("linear backward expects gradient of shape [" +
                                std::to_string(B) + "," + std::to_string(out_f_) + "], got " +
                                dy.shape_str());
  Tensor dx({B, in_f_});
#pragma omp parallel for schedule(static)
  for (int b = 0; b < B; ++b) {
    const real* dyrow = dy.data() + static_cast<size_t>(b) * out_f_;
    real* dxrow = dx.data() + static_cast<size_t>(b) * in_f_;
    for (int g = 0; g < out_f_; ++g) {
      const real d = dyrow[g];
      const real* wrow = weight.data() + static_cast<size_t>(g) * in_f_;
#pragma omp simd
      for (int f = 0; f < in_f_; ++f) dxrow[f] += d * wrow[f];
    }
  }
  grad_weight.zero();
  grad_bias.zero();
#pragma omp parallel for schedule(static)
  for (int g = 0; g < out_f_; ++g) {
    real* dwrow = grad_weight.data() + static_cast<size_t>(g) * in_f_;
    real bsum = 0;
    for (int b = 0; b < B; ++b) {
      const real d = dy.data()[static_cast<size_t>(b) * out_f_ + g];
      const real* xrow = x_.data() + static_cast<size_t>(b) * in_f_;
#pragma omp simd
      for (int f = 0; f < in_f_; ++f) dwrow[f] += d * xrow[f];
      bsum += d;
    }
    grad_bias[g] = bsum;
  }
  return dx;
}

// ---------------------------------------------------------------------------
// BatchNorm
// ---------------------------------------------------------------------------

BatchNorm::BatchNorm(int features, real eps, real momentum)
    : features_(features), eps_(eps), momentum_(momentum) {
  check_positive(features, "features");
  gamma = Tensor::full({features}, 1.0);
  beta = Tensor::zeros({features});
  grad_gamma = Tensor::zeros({features});
  grad_beta = Tensor::zeros({features});
  running_mean = Tensor::zeros({features});
  running_var = Tensor::full({features}, 1.0);
}

namespace {
// [B,F] -> B groups of stride F; [B,C,S...] -> per channel, B*S values
struct BnLayout {
  int B;        // leading batch dim
  int C;        // normalized features
  int S;        // spatial extent per (b, c), 1 for [B,F]
};

BnLayout bn_layout(const Tensor& x, int features) {
  if (x.rank() < 2)
    throw std::invalid_argument("batchnorm expects at least 2D input, got " + x.shape_str());
  if (x.dim(1) != features)
    throw std::invalid_argument("batchnorm over " + std::to_string(features) +
                                " features got input " + x.shape_str());
  int s = 1;
  for (int i = 2; i < x.rank(); ++i) s *= x.dim(i);
  return {x.dim(0), features, s};
}
}  // namespace

Tensor BatchNorm::forward(const Tensor& x, Mode mode, bool update_running) {
  const BnLayout L = bn_layout(x, features_);
  const int64_t m = static_cast<int64_t>(L.B) * L.S;
  mode_ = mode;
  reduce_n_ = m;
  Tensor y(x.shape());
  inv_std_ = Tensor::zeros({features_});
  if (mode == Mode::kTrain) {
    if (m < 2)
      throw std::invalid_argument(
          "batchnorm train mode needs at least 2 values per feature, got " + std::to_string(m) +
          " (input " + x.shape_str() + ")");
    xhat_ = Tensor(x.shape());
#pragma omp parallel for schedule(static)
    for (int c = 0; c < L.C; ++c) {
      real mean = 0;
      for (int b = 0; b < L.B; ++b) {
        const real* p = x.data() + (static_cast<size_t>(b) * L.C + c) * L.S;
        real s = 0;
#pragma omp simd reduction(+ : s)
        for (int i = 0; i < L.S; ++i) s += p[i];
        mean += s;
      }
      mean /= static_cast<real>(m);
      real var = 0;
      for (int b = 0; b < L.B; ++b) {
        const real* p = x.data() + (static_cast<size_t>(b) * L.C + c) * L.S;
        real s = 0;
#pragma omp simd reduction(+ : s)
        for (int i = 0; i < L.S; ++i) s += (p[i] - mean) * (p[i] - mean);
        var += s;
      }
      var /= static_cast<real>(m);  // biased, used for normalization
      const real istd = 1.0 / std::sqrt(var + eps_);
      inv_std_[c] = istd;
      const real g = gamma[c], bt = beta[c];
      for (int b = 0; b < L.B; ++b) {
        const size_t off = (static_cast<size_t>(b) * L.C + c) * L.S;
        const real* p = x.data() + off;
        real* xh = xhat_.data() + off;
        real* yp = y.data() + off;
#pragma omp simd
        for (int i = 0; i < L.S; ++i) {
          xh[i] = (p[i] - mean) * istd;
          yp[i] = g * xh[i] + bt;
        }
      }
      if (update_running) {
        const real unbiased = var * static_cast<real>(m) / static_cast<real>(m - 1);
        running_mean[c] = (1.0 - momentum_) * running_mean[c] + momentum_ * mean;
        running_var[c] = (1.0 - momentum_) * running_var[c] + momentum_ * unbiased;
      }
    }
  } else {
    xhat_ = Tensor(x.shape());
#pragma omp parallel for schedule(static)
    for (int c = 0; c < L.C; ++c) {
      const real istd = 1.0 / std::sqrt(running_var[c] + eps_);
      inv_std_[c] = istd;
      const real mean = running_mean[c], g = gamma[c], bt = beta[c];
      for (int b = 0; b < L.B; ++b) {
        const size_t off = (static_cast<size_t>(b) * L.C + c) * L.S;
        const real* p = x.data() + off;
        real* xh = xhat_.data() + off;
        real* yp = y.data() + off;
#pragma omp simd
        for (int i = 0; i < L.S; ++i) {
          xh[i] = (p[i] - mean) * istd;
          yp[i] = g * xh[i] + bt;
        }
      }
    }
  }
  return y;
}

Tensor BatchNorm::backward(const Tensor& dy) {
  const BnLayout L = bn_layout(dy, features_);
  Tensor dx(dy.shape());
  if (mode_ == Mode::kTrain) {
    if (xhat_.empty() || !xhat_.same_shape(dy))
      throw std::logic_error("batchnorm backward without matching train forward");
    const real m = static_cast<real>(reduce_n_);
#pragma omp parallel for schedule(static)
    for (int c = 0; c < L.C; ++c) {
      real sum_dy = 0, sum_dy_xhat = 0;
      for (int b = 0; b < L.B; ++b) {
        const size_t off = (static_cast<size_t>(b) * L.C + c) * L.S;
        const real* d = dy.data() + off;
        const real* xh = xhat_.data() + off;
        real s1 = 0, s2 = 0;
#pragma omp simd reduction(+ : s1, s2)
        for (int i = 0; i < L.S; ++i) {
          s1 += d[i];
          s2 += d[i] * xh[i];
        }
        sum_dy += s1;
        sum_dy_xhat += s2;
      }
      grad_gamma[c] = sum_dy_xhat;
      grad_beta[c] = sum_dy;
      const real g_istd = gamma[c] * inv_std_[c];
      const real mean_dy = sum_dy / m, mean_dy_xhat = sum_dy_xhat / m;
      for (int b = 0; b < L.B; ++b) {
        const size_t off = (static_cast<size_t>(b) * L.C + c) * L.S;
        const real* d = dy.data() + off;
        const real* xh = xhat_.data() + off;
        real* dp = dx.data() + off;
#pragma omp simd
        for (int i = 0; i < L.S; ++i) dp[i] = g_istd * (d[i] - mean_dy - xh[i] * mean_dy_xhat);
      }
    }
  } else {
    // eval-mode backward: running stats are constants, no batch coupling
    if (xhat_.empty() || !xhat_.same_shape(dy))
      throw std::logic_error("batchnorm backward without matching eval forward");
#pragma omp parallel for schedule(static)
    for (int c = 0; c < L.C; ++c) {
      const real g_istd = gamma[c] * inv_std_[c];
      real sum_dy = 0, sum_dy_xhat = 0;
      for (int b = 0; b < L.B; ++b) {
        const size_t off = (static_cast<size_t>(b) * L.C + c) * L.S;
        const real* d = dy.data() + off;
        const real* xh = xhat_.data() + off;
        real* dp = dx.data() + off;
        for (int i = 0; i < L.S; ++i) {
          dp[i] = g_istd * d[i];
          sum_dy += d[i];
          sum_dy_xhat += d[i] * xh[i];
        }
      }
      grad_gamma[c] = sum_dy_xhat;
      grad_beta[c] = sum_dy;
    }
  }
  return dx;
}

// ---------------------------------------------------------------------------
// ReLU
// ---------------------------------------------------------------------------

Tensor ReLU::forward(const Tensor& x) {
  x_ = x;
  Tensor y(x.shape());
  const real* p = x.data();
  real* q = y.data();
  const int64_t n = x.numel();
#pragma omp simd
  for (int64_t i = 0; i < n; ++i) q[i] = p[i] > 0 ? p[i] : 0;
  return y;
}

Tensor ReLU::backward(const Tensor& dy) const {
  if (x_.empty() || !x_.same_shape(dy))
    throw std::logic_error("relu backward without matching forward");
  Tensor dx(dy.shape());
  const real* p = x_.data();
  const real* d = dy.data();
  real* q = dx.data();
  const int64_t n = dy.numel();
#pragma omp simd
  for (int64_t i = 0; i < n; ++i) q[i] = p[i] > 0 ? d[i] : 0;
  return dx;
}

// ---------------------------------------------------------------------------
// Dropout
// ---------------------------------------------------------------------------

Dropout::Dropout(real rate) : rate_(rate) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw std::invalid_argument("dropout rate must lie in [0,1), got " + std::to_string(rate));
}

Tensor Dropout::forward(const Tensor& x, Mode mode, std::mt19937_64& rng) {
  if (mode == Mode::kEval || rate_ == 0.0) {
    identity_ = true;
    return x;
  }
  identity_ = false;
  mask_ = Tensor(x.shape());
  const real scale = 1.0 / (1.0 - rate_);
  std::uniform_real_distribution<real> u(0.0, 1.0);
  const int64_t n = x.numel();
  for (int64_t i = 0; i < n; ++i) mask_[i] = u(rng) < rate_ ? 0.0 : scale;
  Tensor y(x.shape());
  for (int64_t i = 0; i < n; ++i) y[i] = x[i] * mask_[i];
  return y;
}

Tensor Dropout::backward(const Tensor& dy) const {
  if (identity_) return dy;
  if (!mask_.same_shape(dy)) throw std::logic_error("dropout backward without matching forward");
  Tensor dx(dy.shape());
  const int64_t n = dy.numel();
  for (int64_t i = 0; i < n; ++i) dx[i] = dy[i] * mask_[i];
  return dx;
}

}  // namespace pulsegrid
