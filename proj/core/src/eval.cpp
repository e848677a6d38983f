#include "pulsegrid/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace pulsegrid {

real mae(const std::vector<real>& preds_bpm, const std::vector<real>& refs_bpm) {
  if (preds_bpm.empty()) throw std::invalid_argument("mae: empty prediction list");
  if (preds_bpm.size() != refs_bpm.size())
    throw std::invalid_argument("mae: " + std::to_string(preds_bpm.size()) +
                                " predictions vs " + std::to_string(refs_bpm.size()) +
                                " references");
  real s = 0.0;
  for (size_t i = 0; i < preds_bpm.size(); ++i) s += std::abs(preds_bpm[i] - refs_bpm[i]);
  return s / static_cast<real>(preds_bpm.size());
}

real coverage(const std::vector<real>& preds_bpm, const std::vector<real>& refs_bpm, Task task,
              const ClassGrid& grid) {
  if (preds_bpm.empty()) throw std::invalid_argument("coverage: empty prediction list");
  if (preds_bpm.size() != refs_bpm.size())
    throw std::invalid_argument("coverage: " + std::to_string(preds_bpm.size()) +
                                " predictions vs " + std::to_string(refs_bpm.size()) +
                                " references");
  int64_t hits = 0;
  for (size_t i = 0; i < preds_bpm.size(); ++i) {
    if (task == Task::kRegression) {
      if (std::abs(preds_bpm[i] - refs_bpm[i]) < 3.0) ++hits;
    } else {
      if (std::abs(grid.label_of(preds_bpm[i]) - grid.label_of(refs_bpm[i])) <= 4) ++hits;
    }
  }
  return static_cast<real>(hits) / static_cast<real>(preds_bpm.size());
}

const EvalRow& EvalReport::row(const std::string& name) const {
  for (size_t i = 0; i < row_names.size(); ++i)
    if (row_names[i] == name) return rows[i];
  throw std::invalid_argument("no report row named " + name);
}

EvalReport evaluate(Model& model, const std::vector<SignalSample>& samples,
                    const ClassGrid& grid) {
  EvalReport report;
  report.row_names = {"stationary", "mixed_motion", "cam1", "cam2", "cam3", "full"};
  report.rows.assign(report.row_names.size(), EvalRow{});

  std::vector<real> preds;
  preds.reserve(samples.size());
  const int chunk = 256;
  for (size_t at = 0; at < samples.size(); at += chunk) {
    const int count = static_cast<int>(std::min<size_t>(chunk, samples.size() - at));
    Tensor x({count, 1, kChannels, kWindowLen});
    for (int i = 0; i < count; ++i) {
      const real* src = samples[at + static_cast<size_t>(i)].window.data();
      std::copy(src, src + kChannels * kWindowLen,
                x.data() + static_cast<size_t>(i) * kChannels * kWindowLen);
    }
    const Prediction p = model.predict(x);
    preds.insert(preds.end(), p.hr.begin(), p.hr.end());
  }

  for (size_t i = 0; i < samples.size(); ++i)
    report.pairs.push_back(
        {samples[i].ref_hr_bpm, preds[i], samples[i].camera, samples[i].scenario});

  auto fill_row = [&](size_t row, auto&& member) {
    std::vector<real> p, r;
    for (size_t i = 0; i < samples.size(); ++i)
      if (member(samples[i])) {
        p.push_back(preds[i]);
        r.push_back(samples[i].ref_hr_bpm);
      }
    EvalRow& out = report.rows[row];
    out.n = static_cast<int>(p.size());
    if (p.empty()) {
      out.mae = std::numeric_limits<real>::quiet_NaN();
      out.coverage = std::numeric_limits<real>::quiet_NaN();
    } else {
      out.mae = mae(p, r);
      out.coverage = coverage(p, r, model.spec().task, grid);
    }
  };
  fill_row(0, [](const SignalSample& s) { return s.scenario == Scenario::kStationary; });
  fill_row(1, [](const SignalSample& s) { return s.scenario == Scenario::kMixedMotion; });
  fill_row(2, [](const SignalSample& s) { return s.camera == Camera::kCam1; });
  fill_row(3, [](const SignalSample& s) { return s.camera == Camera::kCam2; });
  fill_row(4, [](const SignalSample& s) { return s.camera == Camera::kCam3; });
  fill_row(5, [](const SignalSample&) { return true; });
  return report;
}

namespace {
std::string cell(real v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

void write_report_csv(const EvalReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report " + path);
  out << "subset,n,mae_bpm,coverage\n";
  for (size_t i = 0; i < report.rows.size(); ++i)
    out << report.row_names[i] << "," << report.rows[i].n << "," << cell(report.rows[i].mae)
        << "," << cell(report.rows[i].coverage) << "\n";
  if (!out) throw std::runtime_error("failed writing report " + path);
}

void write_report_json(const EvalReport& report, const std::string& path) {
  nlohmann::json j;
  for (size_t i = 0; i < report.rows.size(); ++i) {
    nlohmann::json row;
    row["n"] = report.rows[i].n;
    row["mae_bpm"] =
        std::isfinite(report.rows[i].mae) ? nlohmann::json(report.rows[i].mae) : nullptr;
    row["coverage"] = std::isfinite(report.rows[i].coverage)
                          ? nlohmann::json(report.rows[i].coverage)
                          : nullptr;
    j[report.row_names[i]] = row;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report " + path);
  out << j.dump(1) << "\n";
  if (!out) throw std::runtime_error("failed writing report " + path);
}

void write_pairs_csv(const EvalReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write pairs " + path);
  out << "ref_bpm,pred_bpm,camera,scenario\n";
  for (const PairRecord& p : report.pairs)
    out << cell(p.ref_bpm) << "," << cell(p.pred_bpm) << "," << camera_name(p.camera) << ","
        << scenario_name(p.scenario) << "\n";
  if (!out) throw std::runtime_error("failed writing pairs " + path);
}

std::vector<std::vector<Camera>> default_camera_subsets() {
  using C = Camera;
  return {{C::kCam1},          {C::kCam2},          {C::kCam3},
          {C::kCam1, C::kCam2}, {C::kCam1, C::kCam3}, {C::kCam2, C::kCam3}};
}

namespace {
std::string subset_name(const std::vector<Camera>& subset) {
  std::string name;
  for (const Camera c : subset) {
    if (!name.empty()) name += "+";
    name += camera_name(c);
  }
  return name;
}
}  // namespace

GenMatrix generalization_matrix(const std::vector<ColorSignalSequence>& data,
                                const TrainConfig& config,
                                const std::vector<std::vector<Camera>>& train_subsets) {
  GenMatrix m;
  m.col_names = {"cam1", "cam2", "cam3", "full"};

  std::vector<std::vector<SignalSample>> per_sequence;
  std::vector<std::string> warnings;
  for (const ColorSignalSequence& seq : data)
    per_sequence.push_back(window_sequence(seq, {}, &warnings));
  const SplitSets splits = split_sets(per_sequence, &warnings);
  m.warnings = std::move(warnings);

  std::set<Camera> present;
  for (const ColorSignalSequence& seq : data) present.insert(seq.camera);
  if (present.size() < 2)
    m.warnings.push_back("fewer than 2 cameras in the data; the matrix degenerates");

  auto test_of = [&](Camera c) {
    std::vector<SignalSample> out;
    for (const SignalSample& s : splits.test)
      if (s.camera == c) out.push_back(s);
    return out;
  };
  const std::vector<std::vector<SignalSample>> test_cols = {
      test_of(Camera::kCam1), test_of(Camera::kCam2), test_of(Camera::kCam3), splits.test};

  for (size_t row = 0; row < train_subsets.size(); ++row) {
    const std::vector<Camera>& subset = train_subsets[row];
    auto in_subset = [&subset](Camera c) {
      return std::find(subset.begin(), subset.end(), c) != subset.end();
    };
    SplitSets sub;
    for (const SignalSample& s : splits.train)
      if (in_subset(s.camera)) sub.train.push_back(s);
    for (const SignalSample& s : splits.val)
      if (in_subset(s.camera)) sub.val.push_back(s);

    if (subset.size() >= 2) {
      std::mt19937_64 rng(config.seed + 0x6d6f7271u + static_cast<uint64_t>(row));
      std::shuffle(sub.train.begin(), sub.train.end(), rng);
      sub.train.resize(sub.train.size() / 2);
    }

    m.row_names.push_back(subset_name(subset));
    std::vector<real> row_mae;
    if (sub.train.size() < 2) {
      m.warnings.push_back("training subset " + m.row_names.back() +
                           " has fewer than 2 samples; row skipped");
      row_mae.assign(m.col_names.size(), std::numeric_limits<real>::quiet_NaN());
      m.mae.push_back(std::move(row_mae));
      continue;
    }
    TrainResult result = train_loop(config, sub);
    for (const std::vector<SignalSample>& col : test_cols) {
      if (col.empty()) {
        row_mae.push_back(std::numeric_limits<real>::quiet_NaN());
        continue;
      }
      const EvalReport rep = evaluate(result.model, col);
      row_mae.push_back(rep.row("full").mae);
    }
    m.mae.push_back(std::move(row_mae));
  }
  return m;
}

void write_genmatrix_csv(const GenMatrix& matrix, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write matrix " + path);
  out << "train_subset";
  for (const std::string& c : matrix.col_names) out << "," << c;
  out << "\n";
  for (size_t r = 0; r < matrix.row_names.size(); ++r) {
    out << matrix.row_names[r];
    for (const real v : matrix.mae[r]) out << "," << cell(v);
    out << "\n";
  }
  if (!out) throw std::runtime_error("failed writing matrix " + path);
}

}  // namespace pulsegrid
