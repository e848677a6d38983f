#pragma once

#include <string>
#include <vector>

#include "pulsegrid/data.hpp"
#include "pulsegrid/model.hpp"
#include "pulsegrid/train.hpp"

namespace pulsegrid {

// Mean absolute error in bpm. Classification predictions must already be
// converted to bpm via class centers.
real mae(const std::vector<real>& preds_bpm, const std::vector<real>& refs_bpm);

// Regression: fraction with |pred - ref| < 3 bpm (strict). Classification:
// fraction with |label(pred) - label(ref)| <= 4.
real coverage(const std::vector<real>& preds_bpm, const std::vector<real>& refs_bpm, Task task,
              const ClassGrid& grid = {});

struct EvalRow {
  int n = 0;
  real mae = 0.0;       // NaN when n == 0
  real coverage = 0.0;  // NaN when n == 0
};

struct PairRecord {
  real ref_bpm = 0.0;
  real pred_bpm = 0.0;
  Camera camera = Camera::kSynthetic;
  Scenario scenario = Scenario::kSynthetic;
};

// Rows in fixed order: stationary, mixed_motion, cam1, cam2, cam3, full.
// Every sample lands in full exactly once; scenario/camera rows cover only
// matching tags (synthetic tags contribute to full alone).
struct EvalReport {
  std::vector<std::string> row_names;
  std::vector<EvalRow> rows;
  std::vector<PairRecord> pairs;

  const EvalRow& row(const std::string& name) const;
};

EvalReport evaluate(Model& model, const std::vector<SignalSample>& samples,
                    const ClassGrid& grid = {});

void write_report_csv(const EvalReport& report, const std::string& path);
void write_report_json(const EvalReport& report, const std::string& path);
void write_pairs_csv(const EvalReport& report, const std::string& path);

// Leave-cameras-out generalization: one row per training camera subset, one
// column per test camera plus full. Two-camera training subsets drop a
// random half of their train windows to keep sample counts comparable.
struct GenMatrix {
  std::vector<std::string> row_names;  // e.g. "cam1", "cam1+cam2"
  std::vector<std::string> col_names;  // cam1, cam2, cam3, full
  std::vector<std::vector<real>> mae;  // [row][col], NaN for empty columns
  std::vector<std::string> warnings;
};

std::vector<std::vector<Camera>> default_camera_subsets();

GenMatrix generalization_matrix(const std::vector<ColorSignalSequence>& data,
                                const TrainConfig& config,
                                const std::vector<std::vector<Camera>>& train_subsets);

void write_genmatrix_csv(const GenMatrix& matrix, const std::string& path);

}  // namespace pulsegrid
