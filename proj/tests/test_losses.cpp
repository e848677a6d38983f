#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "helpers.hpp"
#include "pulsegrid/grad_check.hpp"
#include "pulsegrid/losses.hpp"

using namespace pulsegrid;

namespace {

const ClassGrid kGrid{};

// independent kernel arithmetic: sum of exp(-d^2 / (2 sigma^2)) over -r..r
real kernel_sum(real sigma_idx, int radius) {
  real s = 0.0;
  for (int d = -radius; d <= radius; ++d) s += std::exp(-0.5 * d * d / (sigma_idx * sigma_idx));
  return s;
}

std::vector<real> softmax(const std::vector<real>& logits) {
  real mx = logits[0];
  for (real v : logits) mx = std::max(mx, v);
  std::vector<real> p(logits.size());
  real z = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) z += (p[i] = std::exp(logits[i] - mx));
  for (real& v : p) v /= z;
  return p;
}

}  // namespace

TEST_CASE("smoothing spec unit conversion") {
  SmoothingSpec weights = SmoothingSpec::for_class_weights();
  SmoothingSpec onehot = SmoothingSpec::for_one_hot();
  CHECK(weights.window_indices(kGrid) == 19);
  CHECK(onehot.window_indices(kGrid) == 19);
  // 13 bpm / (85/128 bpm per index)
  CHECK(weights.sigma_indices(kGrid) == doctest::Approx(1664.0 / 255.0).epsilon(1e-12));
  CHECK(onehot.sigma_indices(kGrid) == doctest::Approx(1664.0 / 510.0).epsilon(1e-12));

  SmoothingSpec tiny{1.0, 0.5};  // 1 bpm window -> 1.5 indices -> clamped to 3
  CHECK(tiny.window_indices(kGrid) == 3);
}

TEST_CASE("gaussian kernel is positive, symmetric, peak 1 at center") {
  std::vector<real> k = gaussian_kernel(SmoothingSpec::for_one_hot(), kGrid);
  REQUIRE(k.size() == 19);
  const int r = 9;
  CHECK(k[r] == 1.0);
  for (int d = 0; d <= r; ++d) {
    CHECK(k[r + d] == doctest::Approx(k[r - d]).epsilon(1e-15));
    CHECK(k[r + d] > 0.0);
    if (d > 0) CHECK(k[r + d] < k[r + d - 1]);
  }
}

TEST_CASE("gaussian_smooth_normalize: one-hot bumps and edge truncation") {
  SmoothingSpec spec = SmoothingSpec::for_one_hot();

  std::vector<real> onehot(128, 0.0);
  onehot[64] = 1.0;
  std::vector<real> s = gaussian_smooth_normalize(onehot, spec, kGrid);
  real sum = 0.0;
  for (real v : s) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  int best = 0;
  for (int i = 1; i < 128; ++i)
    if (s[i] > s[best]) best = i;
  CHECK(best == 64);
  for (int d = 1; d <= 9; ++d) CHECK(s[64 + d] == doctest::Approx(s[64 - d]).epsilon(1e-12));
  CHECK(s[64 + 10] == 0.0);  // outside the 19-index window

  std::vector<real> edge(128, 0.0);
  edge[0] = 1.0;
  std::vector<real> e = gaussian_smooth_normalize(edge, spec, kGrid);
  sum = 0.0;
  for (real v : e) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(e[0] > e[1]);  // truncated half-bump still peaks at 0
  // truncation drops the left half of the kernel, so the center value exceeds
  // the interior bump's center: 1/sum(half) > 1/sum(full)
  CHECK(e[0] > s[64]);
}

TEST_CASE("gaussian_smooth_normalize: uniform input stays uniform in the interior") {
  SmoothingSpec spec = SmoothingSpec::for_class_weights();
  std::vector<real> uniform(128, 3.5);
  std::vector<real> s = gaussian_smooth_normalize(uniform, spec, kGrid);
  real sum = 0.0;
  for (real v : s) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  // indices 9..118 see the full kernel; zero-extension shaves mass off the edges
  for (int i = 10; i <= 118; ++i) CHECK(s[i] == doctest::Approx(s[9]).epsilon(1e-12));
  CHECK(s[0] < s[64]);
  CHECK(s[127] < s[64]);
  CHECK(s[64] > 1.0 / 128.0);  // normalization pushes the interior above exact uniform
}

TEST_CASE("gaussian_smooth_normalize input validation") {
  SmoothingSpec spec = SmoothingSpec::for_one_hot();
  CHECK_THROWS_AS(gaussian_smooth_normalize(std::vector<real>(128, 0.0), spec, kGrid),
                  std::invalid_argument);
  std::vector<real> neg(128, 1.0);
  neg[5] = -1e-3;
  CHECK_THROWS_AS(gaussian_smooth_normalize(neg, spec, kGrid), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_smooth_normalize({}, spec, kGrid), std::invalid_argument);
}

TEST_CASE("smoothed_one_hot matches closed-form kernel arithmetic") {
  std::vector<real> s = smoothed_one_hot(64, kGrid);
  const real sigma = SmoothingSpec::for_one_hot().sigma_indices(kGrid);
  const real center = 1.0 / kernel_sum(sigma, 9);
  CHECK(s[64] == doctest::Approx(center).epsilon(1e-12));

  std::vector<real> e = smoothed_one_hot(0, kGrid);
  real sum = 0.0;
  int best = 0;
  for (int i = 0; i < 128; ++i) {
    sum += e[i];
    if (e[i] > e[best]) best = i;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(best == 0);

  CHECK_THROWS_AS(smoothed_one_hot(-1, kGrid), std::invalid_argument);
  CHECK_THROWS_AS(smoothed_one_hot(128, kGrid), std::invalid_argument);

  SmoothedTargets targets(kGrid);
  CHECK(targets.n_classes() == 128);
  for (int y : {0, 31, 64, 127}) {
    std::vector<real> direct = smoothed_one_hot(y, kGrid);
    for (int i = 0; i < 128; ++i) CHECK(targets.row(y)[i] == direct[i]);
  }
}

TEST_CASE("class_weights: sums to one, bump around lone class") {
  std::vector<int> labels(20, 64);
  ClassWeights w = class_weights(labels, kGrid);
  REQUIRE(w.size() == 128);
  real sum = 0.0;
  for (int i = 0; i < 128; ++i) sum += w[i];
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  int best = 0;
  for (int i = 1; i < 128; ++i)
    if (w[i] > w[best]) best = i;
  CHECK(best == 64);
  CHECK(w[64 + 10] == 0.0);

  CHECK_THROWS_AS(class_weights({}, kGrid), std::invalid_argument);
  CHECK_THROWS_AS(class_weights({128}, kGrid), std::invalid_argument);
  CHECK_THROWS_AS(class_weights({-1}, kGrid), std::invalid_argument);
}

TEST_CASE("class_weights: inverse counts give a 10:1 interior ratio") {
  // classes 30 and 90 are 60 indices apart: their 19-index bumps never overlap
  std::vector<int> labels{30};
  for (int i = 0; i < 10; ++i) labels.push_back(90);
  ClassWeights w = class_weights(labels, kGrid);
  CHECK(w[30] / w[90] == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("class_weights: uniform counts are uniform away from edges") {
  std::vector<int> labels;
  for (int c = 0; c < 128; ++c)
    for (int k = 0; k < 3; ++k) labels.push_back(c);
  ClassWeights w = class_weights(labels, kGrid);
  for (int i = 10; i <= 118; ++i) CHECK(w[i] == doctest::Approx(w[9]).epsilon(1e-12));
}

TEST_CASE("class_weights: shifting labels shifts the bump (interior equivariance)") {
  std::vector<int> a{40, 40, 50};
  std::vector<int> b{45, 45, 55};
  ClassWeights wa = class_weights(a, kGrid);
  ClassWeights wb = class_weights(b, kGrid);
  for (int i = 20; i <= 75; ++i) CHECK(wb[i + 5] == doctest::Approx(wa[i]).epsilon(1e-12));
}

TEST_CASE("se_loss examples") {
  CHECK(se_loss(72.0, 72.0) == 0.0);
  CHECK(se_loss(75.0, 72.0) == 9.0);
  CHECK(se_loss_grad(75.0, 72.0) == 6.0);
}

TEST_CASE("log_sum_exp is stable under large magnitudes") {
  std::vector<real> big{1000.0, 1000.0};
  CHECK(log_sum_exp(big.data(), 2) == doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-12));
  std::vector<real> one{-5.0};
  CHECK(log_sum_exp(one.data(), 1) == doctest::Approx(-5.0).epsilon(1e-15));
  std::vector<real> low{-5000.0, -5000.0, -5000.0};
  CHECK(std::isfinite(log_sum_exp(low.data(), 3)));
}

TEST_CASE("ce_loss analytic examples and composition oracle") {
  ClassWeights w = class_weights({10, 10, 40, 90}, kGrid);

  std::vector<real> uniform(128, 0.7);
  CHECK(ce_loss(uniform, 10, w) == doctest::Approx(w[10] * std::log(128.0)).epsilon(1e-12));

  std::vector<real> dominant(128, 0.0);
  dominant[40] = 50.0;
  CHECK(ce_loss(dominant, 40, w) < 1e-18);
  CHECK(ce_loss(dominant, 40, w) >= 0.0);

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<real> dist(-3.0, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<real> logits(128);
    for (real& v : logits) v = dist(rng);
    int y = static_cast<int>(rng() % 128);
    std::vector<real> p = softmax(logits);
    const real composed = -w[y] * std::log(p[static_cast<size_t>(y)]);
    CHECK(ce_loss(logits, y, w) == doctest::Approx(composed).epsilon(1e-10));

    // shift invariance
    std::vector<real> shifted = logits;
    for (real& v : shifted) v += 17.25;
    CHECK(ce_loss(shifted, y, w) == doctest::Approx(ce_loss(logits, y, w)).epsilon(1e-10));
  }
}

TEST_CASE("cl_loss decomposition") {
  ClassWeights w = class_weights({20, 64, 64, 100}, kGrid);
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<real> dist(-2.0, 2.0);

  SUBCASE("logits equal to the smoothed target kill the MSE term") {
    std::vector<real> target = smoothed_one_hot(64, kGrid);
    CHECK(cl_loss(target, 64, w, 25.0, false, kGrid) ==
          doctest::Approx(ce_loss(target, 64, w)).epsilon(1e-12));
  }

  SUBCASE("alpha = 0 reduces to ce") {
    std::vector<real> logits(128);
    for (real& v : logits) v = dist(rng);
    CHECK(cl_loss(logits, 20, w, 0.0, false, kGrid) ==
          doctest::Approx(ce_loss(logits, 20, w)).epsilon(1e-12));
  }

  SUBCASE("cl - ce equals alpha * mse against an independent oracle") {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<real> logits(128);
      for (real& v : logits) v = dist(rng);
      int y = static_cast<int>(rng() % 128);
      std::vector<real> target = smoothed_one_hot(y, kGrid);
      real mse = 0.0;
      for (int i = 0; i < 128; ++i) {
        const real d = logits[static_cast<size_t>(i)] - target[static_cast<size_t>(i)];
        mse += d * d;
      }
      mse /= 128.0;
      const real cl = cl_loss(logits, y, w, 25.0, false, kGrid);
      const real ce = ce_loss(logits, y, w);
      CHECK(cl - ce == doctest::Approx(25.0 * mse).epsilon(1e-10));
      CHECK(cl >= ce);
    }
  }
}

TEST_CASE("se_batch value and gradient") {
  Tensor yhat = Tensor::from_values({3, 1}, {75.0, 72.0, 60.0});
  std::vector<real> y{72.0, 72.0, 66.0};
  LossResult r = se_batch(yhat, y);
  CHECK(r.value == doctest::Approx((9.0 + 0.0 + 36.0) / 3.0).epsilon(1e-12));
  CHECK(r.grad.at(0, 0) == doctest::Approx(6.0 / 3.0).epsilon(1e-12));
  CHECK(r.grad.at(1, 0) == 0.0);
  CHECK(r.grad.at(2, 0) == doctest::Approx(-12.0 / 3.0).epsilon(1e-12));

  std::mt19937_64 rng(47);
  auto f = [&]() { return se_batch(yhat, y).value; };
  auto report = grad_check(f, {probe_of("yhat", yhat, r.grad)}, 1e-4, 0, rng);
  CHECK(report.max_rel_err() < 1e-8);

  CHECK_THROWS_AS(se_batch(Tensor({2, 1}), std::vector<real>{1.0}), std::invalid_argument);
}

TEST_CASE("ce_batch gradient matches finite differences") {
  ClassWeights w = class_weights({5, 5, 60, 101, 101, 101}, kGrid);
  std::mt19937_64 rng(53);
  Tensor logits({4, 128});
  oracle::randomize(logits, rng, -2.0, 2.0);
  std::vector<int> y{5, 60, 101, 101};

  LossResult r = ce_batch(logits, y, w);
  CHECK(std::isfinite(r.value));
  REQUIRE(r.grad.same_shape(logits));

  // mean-of-samples reduction: scaling B scales the per-sample contribution
  const real single = ce_loss(
      std::vector<real>(logits.data(), logits.data() + 128), 5, w);
  Tensor one({1, 128});
  for (int i = 0; i < 128; ++i) one[i] = logits[i];
  CHECK(ce_batch(one, {5}, w).value == doctest::Approx(single).epsilon(1e-12));

  auto f = [&]() { return ce_batch(logits, y, w).value; };
  auto report = grad_check(f, {probe_of("logits", logits, r.grad)}, 1e-5, 200, rng);
  CHECK(report.max_rel_err() < 1e-6);
}

TEST_CASE("cl_batch gradient matches finite differences in both mse variants") {
  ClassWeights w = class_weights({12, 64, 64, 120}, kGrid);
  SmoothedTargets targets(kGrid);
  std::mt19937_64 rng(59);
  Tensor logits({3, 128});
  oracle::randomize(logits, rng, -1.5, 1.5);
  std::vector<int> y{12, 64, 120};

  for (bool softmax_mse : {false, true}) {
    CAPTURE(softmax_mse);
    LossResult r = cl_batch(logits, y, w, targets, 25.0, softmax_mse);
    CHECK(std::isfinite(r.value));
    auto f = [&]() { return cl_batch(logits, y, w, targets, 25.0, softmax_mse).value; };
    auto report = grad_check(f, {probe_of("logits", logits, r.grad)}, 1e-5, 200, rng);
    CHECK(report.max_rel_err() < 1e-6);
  }

  // raw-logit variant dominates its ce part
  LossResult cl = cl_batch(logits, y, w, targets, 25.0, false);
  LossResult ce = ce_batch(logits, y, w);
  CHECK(cl.value >= ce.value);
}

TEST_CASE("loss kind names round-trip") {
  CHECK(parse_loss_kind("se") == LossKind::kSE);
  CHECK(parse_loss_kind("ce") == LossKind::kCE);
  CHECK(parse_loss_kind("cl") == LossKind::kCL);
  CHECK(loss_kind_name(LossKind::kCL) == "cl");
  CHECK(loss_kind_name(parse_loss_kind("se")) == "se");
  CHECK_THROWS_AS(parse_loss_kind("mse"), std::invalid_argument);
}
