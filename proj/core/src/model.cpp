#include "pulsegrid/model.hpp"

#include <cmath>
#include <stdexcept>

namespace pulsegrid {

std::string task_name(Task task) {
  return task == Task::kRegression ? "regression" : "classification";
}

Task parse_task(const std::string& name) {
  if (name == "regression") return Task::kRegression;
  if (name == "classification") return Task::kClassification;
  throw std::invalid_argument("unknown task '" + name +
                              "' (expected regression or classification)");
}

void ModelSpec::validate() const {
  if (with_filter) {
    if (task != Task::kClassification)
      throw std::invalid_argument("filtering requires the classification task");
    if (fc_out != n_classes + 6)
      throw std::invalid_argument("filter spec needs fc_out = " + std::to_string(n_classes + 6) +
                                  ", got " + std::to_string(fc_out));
  } else if (task == Task::kClassification) {
    if (fc_out != n_classes)
      throw std::invalid_argument("classification spec needs fc_out = " +
                                  std::to_string(n_classes) + ", got " + std::to_string(fc_out));
  } else if (fc_out != 1) {
    throw std::invalid_argument("regression spec needs fc_out = 1, got " +
                                std::to_string(fc_out));
  }
  if (conv_channels <= 0 || fc_hidden <= 0 || n_classes <= 0)
    throw std::invalid_argument("model spec dimensions must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0))
    throw std::invalid_argument("dropout must lie in [0,1)");
}

ModelSpec ModelSpec::regression() {
  ModelSpec s;
  s.task = Task::kRegression;
  s.with_filter = false;
  s.fc_out = 1;
  return s;
}

ModelSpec ModelSpec::classification(bool with_filter) {
  ModelSpec s;
  s.task = Task::kClassification;
  s.with_filter = with_filter;
  s.fc_out = with_filter ? s.n_classes + 6 : s.n_classes;
  return s;
}

namespace {

constexpr int kInH = 18, kInW = 64;

void he_uniform(Tensor& w, int fan_in, std::mt19937_64& rng) {
  const real bound = std::sqrt(6.0 / static_cast<real>(fan_in));
  std::uniform_real_distribution<real> u(-bound, bound);
  for (int64_t i = 0; i < w.numel(); ++i) w[i] = u(rng);
}

}  // namespace

Model::Model(ModelSpec spec, uint64_t seed)
    : spec_(spec),
      seed_(seed),
      dropout_rng_(seed ^ 0x9e3779b97f4a7c15ull),
      conv1_(1, spec.conv_channels, 5, 11),
      conv2_(spec.conv_channels, spec.conv_channels, 5, 11),
      conv3_(spec.conv_channels, spec.conv_channels, 5, 11),
      conv4_(spec.conv_channels, spec.conv_channels, 5, 11),
      conv5_(spec.conv_channels, spec.conv_channels, 2, 11),
      bn1_(spec.conv_channels),
      bn2_(spec.conv_channels),
      bn3_(spec.conv_channels),
      bn4_(spec.conv_channels),
      bn5_(spec.conv_channels),
      fc1_(spec.conv_channels * 14, spec.fc_hidden),
      fc2_(spec.fc_hidden, spec.fc_out),
      bn_fc1_(spec.fc_hidden),
      bn_fc2_(spec.fc_out),
      drop1_(spec.dropout),
      drop2_(spec.dropout),
      fconv1_(1, spec.conv_channels, 3),
      fconv2_(spec.conv_channels, spec.conv_channels, 3),
      fconv3_(spec.conv_channels, 1, 3),
      fbn1_(spec.conv_channels),
      fbn2_(spec.conv_channels),
      fbn3_(1) {
  spec_.validate();
  std::mt19937_64 rng(seed);
  auto init_conv2d = [&rng](Conv2d& c) {
    he_uniform(c.weight, c.in_channels() * c.kernel_h() * c.kernel_w(), rng);
  };
  init_conv2d(conv1_);
  init_conv2d(conv2_);
  init_conv2d(conv3_);
  init_conv2d(conv4_);
  init_conv2d(conv5_);
  he_uniform(fc1_.weight, fc1_.in_features(), rng);
  he_uniform(fc2_.weight, fc2_.in_features(), rng);
  if (spec_.with_filter) {
    he_uniform(fconv1_.weight, 1 * 3, rng);
    he_uniform(fconv2_.weight, spec_.conv_channels * 3, rng);
    he_uniform(fconv3_.weight, spec_.conv_channels * 3, rng);
  }
}

Tensor Model::forward(const Tensor& batch, Mode mode) {
  if (batch.rank() != 4 || batch.dim(1) != 1 || batch.dim(2) != kInH || batch.dim(3) != kInW)
    throw std::invalid_argument(
        "model expects input [B,1,18,64] feeding the chain 18x64 -> 14x54 -> 10x44 -> 6x34 -> "
        "2x24 -> 1x14 -> 224 -> 60 -> " +
        std::to_string(spec_.fc_out) + "; got " + batch.shape_str());
  const int B = batch.dim(0);
  last_batch_ = B;
  trace_.clear();
  auto record = [this](const char* stage, const Tensor& t) {
    trace_.push_back({stage, t.shape()});
  };
  record("input", batch);

  Tensor x = bn1_.forward(relu1_.forward(conv1_.forward(batch)), mode);
  record("conv1", x);
  x = bn2_.forward(relu2_.forward(conv2_.forward(x)), mode);
  record("conv2", x);
  x = bn3_.forward(relu3_.forward(conv3_.forward(x)), mode);
  record("conv3", x);
  x = bn4_.forward(relu4_.forward(conv4_.forward(x)), mode);
  record("conv4", x);
  x = bn5_.forward(relu5_.forward(conv5_.forward(x)), mode);
  record("conv5", x);

  x = x.reshaped({B, spec_.conv_channels * 14});
  record("flatten", x);

  x = drop1_.forward(bn_fc1_.forward(relu_fc1_.forward(fc1_.forward(x)), mode), mode,
                     dropout_rng_);
  record("fc1", x);
  x = drop2_.forward(bn_fc2_.forward(fc2_.forward(x), mode), mode, dropout_rng_);
  record("fc2", x);

  if (spec_.with_filter) {
    x = x.reshaped({B, 1, spec_.fc_out});
    x = fbn1_.forward(frelu1_.forward(fconv1_.forward(x)), mode);
    record("fconv1", x);
    x = fbn2_.forward(frelu2_.forward(fconv2_.forward(x)), mode);
    record("fconv2", x);
    x = fbn3_.forward(frelu3_.forward(fconv3_.forward(x)), mode);
    record("fconv3", x);
    x = x.reshaped({B, spec_.n_classes});
  }
  record("output", x);
  return x;
}

Tensor Model::backward(const Tensor& d_out) {
  Tensor d = d_out;
  if (spec_.with_filter) {
    d = d.reshaped({last_batch_, 1, spec_.n_classes});
    d = fconv3_.backward(frelu3_.backward(fbn3_.backward(d)));
    d = fconv2_.backward(frelu2_.backward(fbn2_.backward(d)));
    d = fconv1_.backward(frelu1_.backward(fbn1_.backward(d)));
    d = d.reshaped({last_batch_, spec_.fc_out});
  }
  d = fc2_.backward(bn_fc2_.backward(drop2_.backward(d)));
  d = fc1_.backward(relu_fc1_.backward(bn_fc1_.backward(drop1_.backward(d))));
  d = d.reshaped({last_batch_, spec_.conv_channels, 1, 14});
  d = conv5_.backward(relu5_.backward(bn5_.backward(d)));
  d = conv4_.backward(relu4_.backward(bn4_.backward(d)));
  d = conv3_.backward(relu3_.backward(bn3_.backward(d)));
  d = conv2_.backward(relu2_.backward(bn2_.backward(d)));
  return conv1_.backward(relu1_.backward(bn1_.backward(d)));
}

Prediction Model::predict(const Tensor& batch) {
  const Tensor out = forward(batch, Mode::kEval);
  const int B = out.dim(0);
  Prediction p;
  p.hr.reserve(static_cast<size_t>(B));
  const ClassGrid grid{40.0, 125.0, spec_.n_classes};
  if (spec_.task == Task::kRegression) {
    for (int b = 0; b < B; ++b) p.hr.push_back(out.at(b, 0));
  } else {
    p.labels.reserve(static_cast<size_t>(B));
    for (int b = 0; b < B; ++b) {
      const int label = argmax_row(out.data() + static_cast<size_t>(b) * spec_.n_classes,
                                   spec_.n_classes);
      p.labels.push_back(label);
      p.hr.push_back(grid.hr_of(label));
    }
  }
  return p;
}

int64_t Model::param_count() const {
  int64_t n = 0;
  for (const auto& [name, t] : state())
    if (name.find("running_") == std::string::npos) n += t->numel();
  return n;
}

std::vector<NamedGrad> Model::trainable() {
  std::vector<NamedGrad> out;
  auto conv2d = [&out](const char* name, Conv2d& c) {
    out.push_back({std::string(name) + ".weight", &c.weight, &c.grad_weight});
    out.push_back({std::string(name) + ".bias", &c.bias, &c.grad_bias});
  };
  auto conv1d = [&out](const char* name, Conv1d& c) {
    out.push_back({std::string(name) + ".weight", &c.weight, &c.grad_weight});
    out.push_back({std::string(name) + ".bias", &c.bias, &c.grad_bias});
  };
  auto linear = [&out](const char* name, Linear& l) {
    out.push_back({std::string(name) + ".weight", &l.weight, &l.grad_weight});
    out.push_back({std::string(name) + ".bias", &l.bias, &l.grad_bias});
  };
  auto bn = [&out](const char* name, BatchNorm& b) {
    out.push_back({std::string(name) + ".gamma", &b.gamma, &b.grad_gamma});
    out.push_back({std::string(name) + ".beta", &b.beta, &b.grad_beta});
  };
  conv2d("conv1", conv1_);
  bn("bn1", bn1_);
  conv2d("conv2", conv2_);
  bn("bn2", bn2_);
  conv2d("conv3", conv3_);
  bn("bn3", bn3_);
  conv2d("conv4", conv4_);
  bn("bn4", bn4_);
  conv2d("conv5", conv5_);
  bn("bn5", bn5_);
  linear("fc1", fc1_);
  bn("bn_fc1", bn_fc1_);
  linear("fc2", fc2_);
  bn("bn_fc2", bn_fc2_);
  if (spec_.with_filter) {
    conv1d("fconv1", fconv1_);
    bn("fbn1", fbn1_);
    conv1d("fconv2", fconv2_);
    bn("fbn2", fbn2_);
    conv1d("fconv3", fconv3_);
    bn("fbn3", fbn3_);
  }
  return out;
}

std::vector<std::pair<std::string, Tensor*>> Model::state() {
  std::vector<std::pair<std::string, Tensor*>> out;
  for (const NamedGrad& p : trainable()) out.emplace_back(p.name, p.value);
  auto bn_stats = [&out](const char* name, BatchNorm& b) {
    out.emplace_back(std::string(name) + ".running_mean", &b.running_mean);
    out.emplace_back(std::string(name) + ".running_var", &b.running_var);
  };
  bn_stats("bn1", bn1_);
  bn_stats("bn2", bn2_);
  bn_stats("bn3", bn3_);
  bn_stats("bn4", bn4_);
  bn_stats("bn5", bn5_);
  bn_stats("bn_fc1", bn_fc1_);
  bn_stats("bn_fc2", bn_fc2_);
  if (spec_.with_filter) {
    bn_stats("fbn1", fbn1_);
    bn_stats("fbn2", fbn2_);
    bn_stats("fbn3", fbn3_);
  }
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> Model::state() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  for (const auto& [name, t] : const_cast<Model*>(this)->state()) out.emplace_back(name, t);
  return out;
}

int argmax_row(const real* row, int n) {
  int best = 0;
  for (int i = 1; i < n; ++i)
    if (row[i] > row[best]) best = i;
  return best;
}

}  // namespace pulsegrid
