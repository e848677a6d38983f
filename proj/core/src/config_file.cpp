#include "pulsegrid/config_file.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pulsegrid {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config key " + key + ": cannot parse '" + v + "' as boolean");
}

template <typename T, typename Fn>
T parse_num(const std::string& v, const std::string& key, Fn&& fn) {
  try {
    size_t pos = 0;
    T out = fn(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return out;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": cannot parse '" + v + "'");
  }
}

int parse_int(const std::string& v, const std::string& key) {
  return parse_num<int>(v, key, [](const std::string& s, size_t* p) { return std::stoi(s, p); });
}

uint64_t parse_u64(const std::string& v, const std::string& key) {
  return parse_num<uint64_t>(v, key,
                             [](const std::string& s, size_t* p) { return std::stoull(s, p); });
}

real parse_float(const std::string& v, const std::string& key) {
  return parse_num<real>(v, key, [](const std::string& s, size_t* p) { return std::stod(s, p); });
}

std::string fmt(real v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 'key = value', got '" + t + "'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

TrainConfig train_config_from(const std::map<std::string, std::string>& kv, TrainConfig base) {
  for (const auto& [key, value] : kv) {
    if (key == "batch_size") base.batch_size = parse_int(value, key);
    else if (key == "epochs") base.epochs = parse_int(value, key);
    else if (key == "loss") base.loss = parse_loss_kind(value);
    else if (key == "with_filter") base.with_filter = parse_bool(value, key);
    else if (key == "alpha") base.alpha = parse_float(value, key);
    else if (key == "seed") base.seed = parse_u64(value, key);
    else if (key == "lr_min") base.lr_min = parse_float(value, key);
    else if (key == "lr_max") base.lr_max = parse_float(value, key);
    else if (key == "adam_beta1") base.adam.beta1 = parse_float(value, key);
    else if (key == "adam_beta2") base.adam.beta2 = parse_float(value, key);
    else if (key == "adam_eps") base.adam.eps = parse_float(value, key);
    else if (key == "dropout") base.dropout = parse_float(value, key);
    else if (key == "softmax_mse") base.softmax_mse = parse_bool(value, key);
    else
      throw std::invalid_argument("unknown config key '" + key + "'");
  }
  return base;
}

std::map<std::string, std::string> config_to_map(const TrainConfig& config) {
  return {{"batch_size", std::to_string(config.batch_size)},
          {"epochs", std::to_string(config.epochs)},
          {"loss", loss_kind_name(config.loss)},
          {"with_filter", config.with_filter ? "true" : "false"},
          {"alpha", fmt(config.alpha)},
          {"seed", std::to_string(config.seed)},
          {"lr_min", fmt(config.lr_min)},
          {"lr_max", fmt(config.lr_max)},
          {"adam_beta1", fmt(config.adam.beta1)},
          {"adam_beta2", fmt(config.adam.beta2)},
          {"adam_eps", fmt(config.adam.eps)},
          {"dropout", fmt(config.dropout)},
          {"softmax_mse", config.softmax_mse ? "true" : "false"}};
}

}  // namespace pulsegrid
