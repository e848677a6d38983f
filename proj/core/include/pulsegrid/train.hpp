#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pulsegrid/data.hpp"
#include "pulsegrid/losses.hpp"
#include "pulsegrid/model.hpp"
#include "pulsegrid/optimizer.hpp"
#include "pulsegrid/schedule.hpp"

namespace pulsegrid {

struct TrainConfig {
  int batch_size = 64;
  int epochs = 300;
  LossKind loss = LossKind::kCL;
  bool with_filter = false;
  real alpha = 25.0;
  uint64_t seed = 0;
  real lr_min = 5.8e-5;
  real lr_max = 5.8e-3;
  AdamConfig adam;
  real dropout = 0.5;
  bool softmax_mse = false;  // apply softmax before the CL MSE term

  void validate() const;  // lr_min < lr_max; with_filter forbids SE; sizes positive

  ModelSpec model_spec() const;
};

struct EpochStat {
  real train_loss = 0.0;
  real val_mae = 0.0;  // NaN when the val set is empty
  real lr = 0.0;       // rate of the epoch's last optimizer step
};

struct TrainLog {
  std::vector<EpochStat> epochs;
  int best_epoch = -1;  // argmin val MAE; final epoch when val is empty
  real best_val_mae = 0.0;
  std::vector<std::string> warnings;
};

struct TrainResult {
  TrainLog log;
  Model model;  // parameters restored to the best-val checkpoint
};

// Adam + 1cycle over epochs * batches_per_epoch steps; the train set is
// reshuffled and re-augmented every epoch; class weights come from the train
// split only. Per epoch the val MAE (eval mode, no augmentation) drives best
// checkpoint selection. Deterministic for fixed (config, data).
TrainResult train_loop(const TrainConfig& config, const SplitSets& splits);

void write_train_log_csv(const TrainLog& log, const std::string& path);

// Short constant-rate probes (epochs_per_point each, fresh model per rate)
// scored by train-set MAE, then analyzed into (lr_min, lr_max). Diverged
// probes are dropped; if all diverge the analysis throws.
LrCurve lr_range_test(const TrainConfig& config, const std::vector<SignalSample>& train,
                      const std::vector<real>& lr_grid, int epochs_per_point = 5);

void write_lr_curve_csv(const LrCurve& curve, const std::string& path);

}  // namespace pulsegrid
