// pulsegrid: synthesize, validate, train, lr-find, evaluate, genmatrix.
// Exit codes: 0 success, 1 internal failure, 2 invalid input/config.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pulsegrid/checkpoint.hpp"
#include "pulsegrid/config_file.hpp"
#include "pulsegrid/data.hpp"
#include "pulsegrid/dataset_io.hpp"
#include "pulsegrid/eval.hpp"
#include "pulsegrid/run_manifest.hpp"
#include "pulsegrid/schedule.hpp"
#include "pulsegrid/synth.hpp"
#include "pulsegrid/threads.hpp"
#include "pulsegrid/train.hpp"

namespace fs = std::filesystem;
using namespace pulsegrid;

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;

// Shared flags; each subcommand registers the subset it uses.
struct Opts {
  std::string config;
  std::string data;
  std::string out;
  std::string checkpoint;
  std::string loss;
  std::string cameras;
  std::string scenario;
  uint64_t seed = 0;
  bool seed_set = false;
  bool filter = false;
  bool filter_set = false;
  int epochs = 0;
  bool epochs_set = false;
  int batch = 0;
  bool batch_set = false;
  bool force = false;

  // synth extras
  int n_sequences = 12;
  real duration_s = 60.0;
  real hr_lo = 50.0;
  real hr_hi = 110.0;
  real snr_db = 15.0;
  real drift = 0.0;
  bool plain_tags = false;
};

void add_train_overrides(CLI::App* cmd, Opts& o) {
  cmd->add_option("--config", o.config, "key = value config file; flags win over file");
  cmd->add_option("--seed", o.seed, "RNG seed")->each([&](const std::string&) { o.seed_set = true; });
  cmd->add_option("--loss", o.loss, "loss: se, ce, or cl")
      ->check(CLI::IsMember({"se", "ce", "cl"}));
  cmd->add_flag("--filter,!--no-filter", o.filter, "append the 1D filtering head")
      ->each([&](const std::string&) { o.filter_set = true; });
  cmd->add_option("--epochs", o.epochs, "training epochs")
      ->each([&](const std::string&) { o.epochs_set = true; });
  cmd->add_option("--batch", o.batch, "batch size")
      ->each([&](const std::string&) { o.batch_set = true; });
}

TrainConfig effective_train_config(const Opts& o) {
  TrainConfig cfg;
  if (!o.config.empty()) cfg = train_config_from(read_config_file(o.config));
  if (o.seed_set) cfg.seed = o.seed;
  if (!o.loss.empty()) cfg.loss = parse_loss_kind(o.loss);
  if (o.filter_set) cfg.with_filter = o.filter;
  if (o.epochs_set) cfg.epochs = o.epochs;
  if (o.batch_set) cfg.batch_size = o.batch;
  cfg.validate();
  return cfg;
}

// Refuses to clobber a previous run unless --force; creates the directory.
void prepare_out(const std::string& out, bool force) {
  if (out.empty()) throw std::invalid_argument("--out is required");
  if (!force && fs::exists(fs::path(out) / "run_manifest.json"))
    throw std::invalid_argument("output directory " + out +
                                " already holds a run; pass --force to overwrite");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw std::invalid_argument("cannot create output directory " + out + ": " + ec.message());
}

std::vector<ColorSignalSequence> load_sequences(const std::string& data,
                                                const std::string& scenario) {
  if (data.empty()) throw std::invalid_argument("--data is required");
  if (!fs::exists(data)) throw std::invalid_argument("data directory " + data + " does not exist");
  IngestResult in;
  try {
    in = ingest(data);
  } catch (const std::runtime_error& e) {  // unreadable dataset is a usage error
    throw std::invalid_argument(e.what());
  }
  for (const Rejection& r : in.rejections)
    std::fprintf(stderr, "warning: rejected %s: %s\n", r.file.c_str(), r.reason.c_str());
  if (!scenario.empty()) {
    const Scenario want = parse_scenario(scenario);
    std::erase_if(in.sequences,
                  [&](const ColorSignalSequence& s) { return s.scenario != want; });
  }
  if (in.sequences.empty())
    throw std::invalid_argument("no usable sequences in " + data +
                                (scenario.empty() ? "" : " with scenario " + scenario));
  return in.sequences;
}

SplitSets split_of(const std::vector<ColorSignalSequence>& seqs) {
  std::vector<std::vector<SignalSample>> per_sequence;
  std::vector<std::string> warnings;
  per_sequence.reserve(seqs.size());
  for (const ColorSignalSequence& s : seqs) per_sequence.push_back(window_sequence(s, {}, &warnings));
  SplitSets splits = split_sets(per_sequence, &warnings);
  for (const std::string& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return splits;
}

// The manifest goes out first so an interrupted run still identifies itself.
void log_manifest(const std::string& command, const std::map<std::string, std::string>& config,
                  uint64_t seed, const std::string& data, const std::string& out,
                  const std::vector<std::string>& artifacts) {
  RunManifest m;
  m.command = command;
  m.config = config;
  m.seed = seed;
  m.data_fingerprint = data.empty() ? "none" : fingerprint_string(data);
  m.artifacts = artifacts;
  write_run_manifest(m, out);
  std::printf("%s: data %s -> %s\n", command.c_str(), m.data_fingerprint.c_str(), out.c_str());
}

void print_report(const EvalReport& report) {
  std::printf("%-14s %6s %9s %9s\n", "subset", "n", "mae_bpm", "coverage");
  for (size_t i = 0; i < report.rows.size(); ++i) {
    const EvalRow& r = report.rows[i];
    if (r.n == 0)
      std::printf("%-14s %6d %9s %9s\n", report.row_names[i].c_str(), 0, "-", "-");
    else
      std::printf("%-14s %6d %9.2f %8.1f%%\n", report.row_names[i].c_str(), r.n, r.mae,
                  100.0 * r.coverage);
  }
}

int cmd_synth(const Opts& o) {
  SynthConfig cfg;
  cfg.n_sequences = o.n_sequences;
  cfg.duration_s = o.duration_s;
  cfg.hr_lo = o.hr_lo;
  cfg.hr_hi = o.hr_hi;
  cfg.snr_db = o.snr_db;
  cfg.seed = o.seed;
  cfg.hr_drift_bpm = o.drift;
  cfg.tag_cameras = !o.plain_tags;
  cfg.validate();
  prepare_out(o.out, o.force);

  std::map<std::string, std::string> kv{
      {"n_sequences", std::to_string(cfg.n_sequences)},
      {"duration_s", std::to_string(cfg.duration_s)},
      {"hr_lo", std::to_string(cfg.hr_lo)},
      {"hr_hi", std::to_string(cfg.hr_hi)},
      {"snr_db", std::to_string(cfg.snr_db)},
      {"hr_drift_bpm", std::to_string(cfg.hr_drift_bpm)},
      {"tag_cameras", cfg.tag_cameras ? "true" : "false"},
  };
  log_manifest("synth", kv, cfg.seed, "", o.out, {"manifest.csv"});

  std::vector<ColorSignalSequence> seqs = synth_generate(cfg);
  write_dataset(seqs, o.out);
  std::printf("wrote %zu sequences to %s\n", seqs.size(), o.out.c_str());
  return 0;
}

int cmd_validate(const Opts& o) {
  if (o.data.empty()) throw std::invalid_argument("--data is required");
  if (!fs::exists(o.data)) throw std::invalid_argument("data directory " + o.data + " does not exist");
  IngestResult in;
  try {
    in = ingest(o.data);
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument(e.what());
  }
  for (const Rejection& r : in.rejections)
    std::printf("reject %s: %s\n", r.file.c_str(), r.reason.c_str());
  std::printf("%zu sequences ok, %zu rejected (data %s)\n", in.sequences.size(),
              in.rejections.size(), fingerprint_string(o.data).c_str());
  return in.rejections.empty() && !in.sequences.empty() ? 0 : kExitUsage;
}

int cmd_train(const Opts& o) {
  TrainConfig cfg = effective_train_config(o);
  std::vector<ColorSignalSequence> seqs = load_sequences(o.data, o.scenario);
  prepare_out(o.out, o.force);
  log_manifest("train", config_to_map(cfg), cfg.seed, o.data, o.out,
               {"checkpoint.json", "train_log.csv"});

  SplitSets splits = split_of(seqs);
  std::printf("train %zu / val %zu / test %zu samples\n", splits.train.size(),
              splits.val.size(), splits.test.size());
  TrainResult r = train_loop(cfg, splits);
  for (const std::string& w : r.log.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

  CheckpointMeta meta{r.log.best_epoch, r.log.best_val_mae};
  save_checkpoint(r.model, meta, (fs::path(o.out) / "checkpoint.json").string());
  write_train_log_csv(r.log, (fs::path(o.out) / "train_log.csv").string());
  std::printf("best epoch %d, val MAE %.3f bpm\n", r.log.best_epoch, r.log.best_val_mae);
  return 0;
}

int cmd_lr_find(const Opts& o) {
  TrainConfig cfg = effective_train_config(o);
  std::vector<ColorSignalSequence> seqs = load_sequences(o.data, o.scenario);
  prepare_out(o.out, o.force);
  log_manifest("lr-find", config_to_map(cfg), cfg.seed, o.data, o.out, {"lr_curve.csv"});

  SplitSets splits = split_of(seqs);
  const int epochs_per_point = o.epochs_set ? o.epochs : 5;
  LrCurve curve = lr_range_test(cfg, splits.train, default_lr_grid(), epochs_per_point);
  write_lr_curve_csv(curve, (fs::path(o.out) / "lr_curve.csv").string());
  if (curve.boundary_warning)
    std::fprintf(stderr, "warning: lr_max sits on the probe-grid boundary\n");
  std::printf("lr_min %.3e, lr_max %.3e over %zu probes\n", curve.lr_min, curve.lr_max,
              curve.lrs.size());
  return 0;
}

int cmd_eval(const Opts& o) {
  if (o.checkpoint.empty()) throw std::invalid_argument("--checkpoint is required");
  if (!fs::exists(o.checkpoint))
    throw std::invalid_argument("checkpoint " + o.checkpoint + " does not exist");
  std::vector<ColorSignalSequence> seqs = load_sequences(o.data, o.scenario);
  prepare_out(o.out, o.force);

  CheckpointMeta meta;
  Model model = load_checkpoint(o.checkpoint, &meta);
  log_manifest("eval",
               {{"checkpoint", o.checkpoint},
                {"checkpoint_fingerprint", fingerprint_string(o.checkpoint)},
                {"best_epoch", std::to_string(meta.epoch)}},
               model.seed(), o.data, o.out, {"report.csv", "report.json", "pairs.csv"});

  SplitSets splits = split_of(seqs);
  EvalReport report = evaluate(model, splits.test);
  write_report_csv(report, (fs::path(o.out) / "report.csv").string());
  write_report_json(report, (fs::path(o.out) / "report.json").string());
  write_pairs_csv(report, (fs::path(o.out) / "pairs.csv").string());
  std::printf("evaluated %zu test samples\n", splits.test.size());
  print_report(report);
  return 0;
}

int cmd_genmatrix(const Opts& o) {
  TrainConfig cfg = effective_train_config(o);
  std::vector<ColorSignalSequence> seqs = load_sequences(o.data, o.scenario);
  prepare_out(o.out, o.force);
  log_manifest("genmatrix", config_to_map(cfg), cfg.seed, o.data, o.out, {"genmatrix.csv"});

  std::vector<std::vector<Camera>> subsets;
  if (o.cameras.empty()) {
    subsets = default_camera_subsets();
  } else {
    std::vector<Camera> one;
    std::string token;
    for (std::istringstream ss(o.cameras); std::getline(ss, token, ',');)
      one.push_back(parse_camera(token));
    if (one.empty()) throw std::invalid_argument("--cameras lists no cameras");
    subsets.push_back(one);
  }

  GenMatrix m = generalization_matrix(seqs, cfg, subsets);
  for (const std::string& w : m.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  write_genmatrix_csv(m, (fs::path(o.out) / "genmatrix.csv").string());

  std::printf("%-12s", "train\\test");
  for (const std::string& c : m.col_names) std::printf(" %8s", c.c_str());
  std::printf("\n");
  for (size_t i = 0; i < m.row_names.size(); ++i) {
    std::printf("%-12s", m.row_names[i].c_str());
    for (real v : m.mae[i])
      std::isnan(v) ? std::printf(" %8s", "-") : std::printf(" %8.2f", v);
    std::printf("\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  init_threads_from_env();

  CLI::App app{"rPPG heart-rate pipeline: synthesize, train, evaluate"};
  app.require_subcommand(1);
  Opts o;

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic color-signal dataset");
  synth->add_option("--out", o.out, "dataset directory")->required();
  synth->add_option("--seed", o.seed, "RNG seed");
  synth->add_option("--n", o.n_sequences, "number of sequences");
  synth->add_option("--duration", o.duration_s, "seconds per sequence");
  synth->add_option("--hr-lo", o.hr_lo, "lower HR bound, bpm");
  synth->add_option("--hr-hi", o.hr_hi, "upper HR bound, bpm");
  synth->add_option("--snr", o.snr_db, "pulse SNR in dB");
  synth->add_option("--drift", o.drift, "peak-to-peak HR drift, bpm");
  synth->add_flag("--plain-tags", o.plain_tags, "tag all sequences camera/scenario synthetic");
  synth->add_flag("--force", o.force, "overwrite an existing run");

  CLI::App* validate = app.add_subcommand("validate", "ingest a dataset and report rejections");
  validate->add_option("--data", o.data, "dataset directory")->required();

  CLI::App* train = app.add_subcommand("train", "train a model and keep the best checkpoint");
  train->add_option("--data", o.data, "dataset directory")->required();
  train->add_option("--out", o.out, "output directory")->required();
  train->add_option("--scenario", o.scenario, "keep only this scenario")
      ->check(CLI::IsMember({"stationary", "mixed_motion", "synthetic"}));
  train->add_flag("--force", o.force, "overwrite an existing run");
  add_train_overrides(train, o);

  CLI::App* lrfind = app.add_subcommand("lr-find", "probe learning rates and pick (lr_min, lr_max)");
  lrfind->add_option("--data", o.data, "dataset directory")->required();
  lrfind->add_option("--out", o.out, "output directory")->required();
  lrfind->add_option("--scenario", o.scenario, "keep only this scenario")
      ->check(CLI::IsMember({"stationary", "mixed_motion", "synthetic"}));
  lrfind->add_flag("--force", o.force, "overwrite an existing run");
  add_train_overrides(lrfind, o);
  lrfind->get_option("--epochs")->description("epochs per probe point (default 5)");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
  eval->add_option("--checkpoint", o.checkpoint, "checkpoint.json path")->required();
  eval->add_option("--data", o.data, "dataset directory")->required();
  eval->add_option("--out", o.out, "output directory")->required();
  eval->add_option("--scenario", o.scenario, "keep only this scenario")
      ->check(CLI::IsMember({"stationary", "mixed_motion", "synthetic"}));
  eval->add_flag("--force", o.force, "overwrite an existing run");

  CLI::App* gen = app.add_subcommand("genmatrix", "leave-cameras-out generalization matrix");
  gen->add_option("--data", o.data, "dataset directory")->required();
  gen->add_option("--out", o.out, "output directory")->required();
  gen->add_option("--cameras", o.cameras, "train on this camera subset only, e.g. cam1,cam2");
  gen->add_option("--scenario", o.scenario, "keep only this scenario")
      ->check(CLI::IsMember({"stationary", "mixed_motion", "synthetic"}));
  gen->add_flag("--force", o.force, "overwrite an existing run");
  add_train_overrides(gen, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(o);
    if (validate->parsed()) return cmd_validate(o);
    if (train->parsed()) return cmd_train(o);
    if (lrfind->parsed()) return cmd_lr_find(o);
    if (eval->parsed()) return cmd_eval(o);
    return cmd_genmatrix(o);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInternal;
  }
}
