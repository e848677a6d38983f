#pragma once

// Independent reference implementations used as test oracles. Everything
// here is written as plainly as possible (naive loops, no shared code with
// the library kernels).

#include <cmath>
#include <random>
#include <vector>

#include "pulsegrid/tensor.hpp"

namespace oracle {

using pulsegrid::Tensor;
using pulsegrid::real;

inline Tensor conv2d_forward(const Tensor& x, const Tensor& w, const Tensor& b) {
  const int B = x.dim(0), Cin = x.dim(1), H = x.dim(2), W = x.dim(3);
  const int Cout = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  Tensor y({B, Cout, H - kh + 1, W - kw + 1});
  for (int n = 0; n < B; ++n)
    for (int co = 0; co < Cout; ++co)
      for (int oy = 0; oy < H - kh + 1; ++oy)
        for (int ox = 0; ox < W - kw + 1; ++ox) {
          real s = b.at(co);
          for (int ci = 0; ci < Cin; ++ci)
            for (int ky = 0; ky < kh; ++ky)
              for (int kx = 0; kx < kw; ++kx)
                s += w.at(co, ci, ky, kx) * x.at(n, ci, oy + ky, ox + kx);
          y.at(n, co, oy, ox) = s;
        }
  return y;
}

struct Conv2dGrads {
  Tensor dx, dw, db;
};

inline Conv2dGrads conv2d_backward(const Tensor& x, const Tensor& w, const Tensor& dy) {
  const int B = x.dim(0), Cin = x.dim(1), H = x.dim(2), W = x.dim(3);
  const int Cout = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  const int OH = H - kh + 1, OW = W - kw + 1;
  Conv2dGrads g{Tensor::zeros(x.shape()), Tensor::zeros(w.shape()), Tensor::zeros({Cout})};
  for (int n = 0; n < B; ++n)
    for (int co = 0; co < Cout; ++co)
      for (int oy = 0; oy < OH; ++oy)
        for (int ox = 0; ox < OW; ++ox) {
          const real d = dy.at(n, co, oy, ox);
          g.db.at(co) += d;
          for (int ci = 0; ci < Cin; ++ci)
            for (int ky = 0; ky < kh; ++ky)
              for (int kx = 0; kx < kw; ++kx) {
                g.dx.at(n, ci, oy + ky, ox + kx) += d * w.at(co, ci, ky, kx);
                g.dw.at(co, ci, ky, kx) += d * x.at(n, ci, oy + ky, ox + kx);
              }
        }
  return g;
}

inline void randomize(Tensor& t, std::mt19937_64& rng, real lo = -1.0, real hi = 1.0) {
  std::uniform_real_distribution<real> u(lo, hi);
  for (int64_t i = 0; i < t.numel(); ++i) t[i] = u(rng);
}

inline real max_abs_diff(const Tensor& a, const Tensor& b) {
  real m = 0.0;
  for (int64_t i = 0; i < a.numel(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// single-sided spectrum magnitude via naive DFT; returns peak frequency in Hz
inline real dft_peak_hz(const std::vector<real>& x, real fs, real f_lo, real f_hi) {
  const int n = static_cast<int>(x.size());
  real mean = 0.0;
  for (real v : x) mean += v;
  mean /= n;
  real best_mag = -1.0, best_f = 0.0;
  for (int k = 1; k <= n / 2; ++k) {
    const real f = fs * k / n;
    if (f < f_lo || f > f_hi) continue;
    real re = 0.0, im = 0.0;
    for (int t = 0; t < n; ++t) {
      const real ph = -2.0 * 3.14159265358979323846 * k * t / n;
      re += (x[static_cast<size_t>(t)] - mean) * std::cos(ph);
      im += (x[static_cast<size_t>(t)] - mean) * std::sin(ph);
    }
    const real mag = re * re + im * im;
    if (mag > best_mag) {
      best_mag = mag;
      best_f = f;
    }
  }
  return best_f;
}

}  // namespace oracle
