#include "pulsegrid/checkpoint.hpp"

#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace pulsegrid {

namespace {
using nlohmann::json;
constexpr const char* kFormat = "pulsegrid-checkpoint";
constexpr int kVersion = 1;
}  // namespace

void save_checkpoint(const Model& model, const CheckpointMeta& meta, const std::string& path) {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  const ModelSpec& s = model.spec();
  j["spec"] = {{"task", task_name(s.task)},       {"with_filter", s.with_filter},
               {"conv_channels", s.conv_channels}, {"fc_hidden", s.fc_hidden},
               {"fc_out", s.fc_out},               {"dropout", s.dropout},
               {"n_classes", s.n_classes}};
  j["seed"] = model.seed();
  j["meta"] = {{"epoch", meta.epoch}, {"val_mae", meta.val_mae}};
  json params = json::object();
  for (const auto& [name, t] : model.state()) {
    params[name] = {{"shape", t->shape()}, {"values", t->values()}};
  }
  j["params"] = params;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint file " + path);
  out << j.dump(1) << "\n";
  if (!out) throw std::runtime_error("failed writing checkpoint file " + path);
}

Model load_checkpoint(const std::string& path, CheckpointMeta* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("checkpoint " + path + " is not valid JSON: " + e.what());
  }
  if (j.value("format", "") != kFormat)
    throw std::runtime_error("checkpoint " + path + " has unknown format");
  const json& sp = j.at("spec");
  ModelSpec spec;
  spec.task = parse_task(sp.at("task").get<std::string>());
  spec.with_filter = sp.at("with_filter").get<bool>();
  spec.conv_channels = sp.at("conv_channels").get<int>();
  spec.fc_hidden = sp.at("fc_hidden").get<int>();
  spec.fc_out = sp.at("fc_out").get<int>();
  spec.dropout = sp.at("dropout").get<real>();
  spec.n_classes = sp.at("n_classes").get<int>();

  Model model(spec, j.at("seed").get<uint64_t>());
  const json& params = j.at("params");
  for (auto& [name, t] : model.state()) {
    if (!params.contains(name))
      throw std::runtime_error("checkpoint " + path + " is missing parameter " + name);
    const json& p = params.at(name);
    const auto shape = p.at("shape").get<std::vector<int>>();
    if (shape != t->shape())
      throw std::runtime_error("checkpoint " + path + ": parameter " + name + " has shape " +
                               shape_to_string(shape) + ", model expects " + t->shape_str());
    auto values = p.at("values").get<std::vector<real>>();
    if (static_cast<int64_t>(values.size()) != t->numel())
      throw std::runtime_error("checkpoint " + path + ": parameter " + name +
                               " has wrong element count");
    t->values() = std::move(values);
  }
  if (meta != nullptr && j.contains("meta")) {
    meta->epoch = j["meta"].value("epoch", 0);
    // NaN (no validation split) serializes as JSON null
    const nlohmann::json vm = j["meta"].value("val_mae", nlohmann::json());
    meta->val_mae = vm.is_number() ? vm.get<real>() : std::numeric_limits<real>::quiet_NaN();
  }
  return model;
}

}  // namespace pulsegrid
