#include "pulsegrid/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "pulsegrid/eval.hpp"

namespace pulsegrid {

void TrainConfig::validate() const {
  if (batch_size < 2)
    throw std::invalid_argument("batch_size must be at least 2 (batch norm needs it)");
  if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (!(lr_min < lr_max)) throw std::invalid_argument("requires lr_min < lr_max");
  if (with_filter && loss == LossKind::kSE)
    throw std::invalid_argument("filtering layers require a classification loss (ce or cl)");
  if (alpha < 0) throw std::invalid_argument("alpha must be >= 0");
  if (!(dropout >= 0.0 && dropout < 1.0))
    throw std::invalid_argument("dropout must lie in [0,1)");
}

ModelSpec TrainConfig::model_spec() const {
  ModelSpec spec = (loss == LossKind::kSE) ? ModelSpec::regression()
                                           : ModelSpec::classification(with_filter);
  spec.dropout = dropout;
  return spec;
}

namespace {

struct BatchPlan {
  std::vector<std::pair<int, int>> ranges;  // (start, count) into the shuffled order
};

// Keep the trailing partial batch, except a singleton, which is merged into
// the previous batch (batch norm needs >= 2 samples).
BatchPlan plan_batches(int n, int batch_size) {
  BatchPlan plan;
  int start = 0;
  while (start < n) {
    int count = std::min(batch_size, n - start);
    if (n - (start + count) == 1) ++count;
    plan.ranges.emplace_back(start, count);
    start += count;
  }
  return plan;
}

Tensor assemble_batch(const std::vector<SignalSample>& samples, const std::vector<int>& order,
                      int start, int count, std::mt19937_64* augment_rng) {
  Tensor x({count, 1, kChannels, kWindowLen});
  for (int i = 0; i < count; ++i) {
    const SignalSample& s = samples[static_cast<size_t>(order[static_cast<size_t>(start + i)])];
    real* dst = x.data() + static_cast<size_t>(i) * kChannels * kWindowLen;
    const real* src = s.window.data();
    std::copy(src, src + kChannels * kWindowLen, dst);
    if (augment_rng != nullptr) {
      std::uniform_real_distribution<real> amp(5e-3, 5e-2);
      const real a = amp(*augment_rng);
      std::uniform_real_distribution<real> noise(-a, a);
      for (int j = 0; j < kChannels * kWindowLen; ++j) dst[j] += noise(*augment_rng);
    }
  }
  return x;
}

real val_mae(Model& model, const std::vector<SignalSample>& val) {
  std::vector<real> preds, refs;
  preds.reserve(val.size());
  refs.reserve(val.size());
  const int chunk = 256;
  std::vector<int> order(val.size());
  std::iota(order.begin(), order.end(), 0);
  for (size_t at = 0; at < val.size(); at += chunk) {
    const int count = static_cast<int>(std::min<size_t>(chunk, val.size() - at));
    const Tensor x = assemble_batch(val, order, static_cast<int>(at), count, nullptr);
    const Prediction p = model.predict(x);
    for (int i = 0; i < count; ++i) {
      preds.push_back(p.hr[static_cast<size_t>(i)]);
      refs.push_back(val[at + static_cast<size_t>(i)].ref_hr_bpm);
    }
  }
  return mae(preds, refs);
}

struct LossEval {
  const TrainConfig& cfg;
  const ClassWeights* weights;
  const SmoothedTargets* targets;

  LossResult operator()(const Tensor& out, const std::vector<SignalSample>& samples,
                        const std::vector<int>& order, int start, int count) const {
    if (cfg.loss == LossKind::kSE) {
      std::vector<real> refs(static_cast<size_t>(count));
      for (int i = 0; i < count; ++i)
        refs[static_cast<size_t>(i)] =
            samples[static_cast<size_t>(order[static_cast<size_t>(start + i)])].ref_hr_bpm;
      return se_batch(out, refs);
    }
    std::vector<int> labels(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i)
      labels[static_cast<size_t>(i)] =
          samples[static_cast<size_t>(order[static_cast<size_t>(start + i)])].label;
    if (cfg.loss == LossKind::kCE) return ce_batch(out, labels, *weights);
    return cl_batch(out, labels, *weights, *targets, cfg.alpha, cfg.softmax_mse);
  }
};

std::vector<int> labels_of(const std::vector<SignalSample>& samples) {
  std::vector<int> labels;
  labels.reserve(samples.size());
  for (const SignalSample& s : samples) labels.push_back(s.label);
  return labels;
}

}  // namespace

TrainResult train_loop(const TrainConfig& config, const SplitSets& splits) {
  config.validate();
  const std::vector<SignalSample>& train = splits.train;
  if (train.size() < 2)
    throw std::invalid_argument("train split has " + std::to_string(train.size()) +
                                " samples; need at least 2");

  Model model(config.model_spec(), config.seed);
  TrainLog log;
  if (splits.val.empty())
    log.warnings.push_back("validation set is empty; keeping the final-epoch checkpoint");

  ClassWeights weights;
  std::unique_ptr<SmoothedTargets> targets;
  const ClassGrid grid;
  if (config.loss != LossKind::kSE) {
    weights = class_weights(labels_of(train), grid);
    if (config.loss == LossKind::kCL) targets = std::make_unique<SmoothedTargets>(grid);
  }
  const LossEval loss_eval{config, &weights, targets.get()};

  Adam opt(model.trainable(), config.adam);
  const int n = static_cast<int>(train.size());
  const BatchPlan plan = plan_batches(n, config.batch_size);
  const int64_t total_steps =
      static_cast<int64_t>(config.epochs) * static_cast<int64_t>(plan.ranges.size());

  std::mt19937_64 shuffle_rng(config.seed ^ 0x5bf0f3b3f9b2fdull);
  std::mt19937_64 augment_rng(config.seed ^ 0xa41dc23a0f0d9cull);
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  std::vector<Tensor> best_state;
  real best = std::numeric_limits<real>::infinity();
  int64_t step = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    real epoch_loss = 0.0;
    real lr = config.lr_min;
    for (const auto& [start, count] : plan.ranges) {
      const Tensor x = assemble_batch(train, order, start, count, &augment_rng);
      const Tensor out = model.forward(x, Mode::kTrain);
      const LossResult loss = loss_eval(out, train, order, start, count);
      if (!std::isfinite(loss.value))
        throw std::runtime_error("non-finite " + loss_kind_name(config.loss) +
                                 " loss at epoch " + std::to_string(epoch) +
                                 "; lower the learning rate");
      model.backward(loss.grad);
      lr = one_cycle_lr(step, total_steps, config.lr_min, config.lr_max);
      opt.step(lr);
      ++step;
      epoch_loss += loss.value * count;
    }
    epoch_loss /= static_cast<real>(n);

    real vmae = std::numeric_limits<real>::quiet_NaN();
    if (!splits.val.empty()) {
      vmae = val_mae(model, splits.val);
      if (vmae < best) {
        best = vmae;
        log.best_epoch = epoch;
        best_state.clear();
        for (const auto& [name, t] : model.state()) best_state.push_back(*t);
      }
    }
    log.epochs.push_back({epoch_loss, vmae, lr});
  }

  if (best_state.empty()) {
    log.best_epoch = config.epochs - 1;
    log.best_val_mae = std::numeric_limits<real>::quiet_NaN();
  } else {
    size_t k = 0;
    for (auto& [name, t] : model.state()) *t = best_state[k++];
    log.best_val_mae = best;
  }
  return TrainResult{std::move(log), std::move(model)};
}

void write_train_log_csv(const TrainLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write train log " + path);
  out << "epoch,train_loss,val_mae,lr\n";
  char buf[96];
  for (size_t e = 0; e < log.epochs.size(); ++e) {
    const EpochStat& s = log.epochs[e];
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", e, s.train_loss, s.val_mae, s.lr);
    out << buf;
  }
  if (!out) throw std::runtime_error("failed writing train log " + path);
}

LrCurve lr_range_test(const TrainConfig& config, const std::vector<SignalSample>& train,
                      const std::vector<real>& lr_grid, int epochs_per_point) {
  config.validate();
  if (train.size() < 2)
    throw std::invalid_argument("lr_range_test needs at least 2 training samples");
  if (epochs_per_point < 1)
    throw std::invalid_argument("lr_range_test: epochs_per_point must be >= 1");

  ClassWeights weights;
  std::unique_ptr<SmoothedTargets> targets;
  const ClassGrid grid;
  if (config.loss != LossKind::kSE) {
    weights = class_weights(labels_of(train), grid);
    if (config.loss == LossKind::kCL) targets = std::make_unique<SmoothedTargets>(grid);
  }
  const LossEval loss_eval{config, &weights, targets.get()};

  const int n = static_cast<int>(train.size());
  const BatchPlan plan = plan_batches(n, config.batch_size);
  std::vector<real> metric;
  metric.reserve(lr_grid.size());

  for (const real lr : lr_grid) {
    Model model(config.model_spec(), config.seed);
    Adam opt(model.trainable(), config.adam);
    std::mt19937_64 shuffle_rng(config.seed ^ 0x5bf0f3b3f9b2fdull);
    std::mt19937_64 augment_rng(config.seed ^ 0xa41dc23a0f0d9cull);
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    real score = std::numeric_limits<real>::infinity();
    try {
      bool diverged = false;
      for (int epoch = 0; epoch < epochs_per_point && !diverged; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (const auto& [start, count] : plan.ranges) {
          const Tensor x = assemble_batch(train, order, start, count, &augment_rng);
          const Tensor out = model.forward(x, Mode::kTrain);
          const LossResult loss = loss_eval(out, train, order, start, count);
          if (!std::isfinite(loss.value)) {
            diverged = true;
            break;
          }
          model.backward(loss.grad);
          opt.step(lr);
        }
      }
      if (!diverged) score = val_mae(model, train);
    } catch (const std::runtime_error&) {
      // non-finite gradients: leave the probe marked as diverged
    }
    metric.push_back(score);
  }
  return analyze_lr_curve(lr_grid, metric);
}

void write_lr_curve_csv(const LrCurve& curve, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write lr curve " + path);
  out << "lr,metric,smoothed,is_lr_max\n";
  char buf[120];
  for (size_t i = 0; i < curve.lrs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d\n", curve.lrs[i], curve.metric[i],
                  curve.smoothed[i], curve.lrs[i] == curve.lr_max ? 1 : 0);
    out << buf;
  }
  if (!out) throw std::runtime_error("failed writing lr curve " + path);
}

}  // namespace pulsegrid
