// Microbenchmarks for the hot paths: conv kernels at the architecture's
// shapes, batchnorm, the losses, and a full CL+F training step.

#include <benchmark/benchmark.h>

#include <random>

#include "pulsegrid/layers.hpp"
#include "pulsegrid/losses.hpp"
#include "pulsegrid/model.hpp"
#include "pulsegrid/threads.hpp"

using namespace pulsegrid;

namespace {

Tensor random_tensor(std::vector<int> shape, uint64_t seed) {
  Tensor t(std::move(shape));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<real> d(-1.0, 1.0);
  for (int64_t i = 0; i < t.numel(); ++i) t[i] = d(rng);
  return t;
}

// conv1 shape: [B,1,18,64] * (16,1,5,11) -> [B,16,14,54]
void BM_Conv2dForward(benchmark::State& state) {
  const int b = static_cast<int>(state.range(0));
  Conv2d conv(1, 16, 5, 11);
  conv.weight = random_tensor(conv.weight.shape(), 1);
  conv.bias = random_tensor(conv.bias.shape(), 2);
  Tensor x = random_tensor({b, 1, 18, 64}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(conv.forward(x));
  state.SetItemsProcessed(state.iterations() * b);
}
BENCHMARK(BM_Conv2dForward)->Arg(1)->Arg(16)->Arg(64);

void BM_Conv2dBackward(benchmark::State& state) {
  const int b = static_cast<int>(state.range(0));
  Conv2d conv(16, 16, 5, 11);
  conv.weight = random_tensor(conv.weight.shape(), 1);
  conv.bias = random_tensor(conv.bias.shape(), 2);
  Tensor x = random_tensor({b, 16, 14, 54}, 3);
  Tensor y = conv.forward(x);
  Tensor dy = random_tensor(y.shape(), 4);
  for (auto _ : state) benchmark::DoNotOptimize(conv.backward(dy));
  state.SetItemsProcessed(state.iterations() * b);
}
BENCHMARK(BM_Conv2dBackward)->Arg(1)->Arg(16)->Arg(64);

// filter head shape: [B,1,134] * (16,1,3)
void BM_Conv1dForward(benchmark::State& state) {
  const int b = static_cast<int>(state.range(0));
  Conv1d conv(16, 16, 3);
  conv.weight = random_tensor(conv.weight.shape(), 1);
  conv.bias = random_tensor(conv.bias.shape(), 2);
  Tensor x = random_tensor({b, 16, 132}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(conv.forward(x));
  state.SetItemsProcessed(state.iterations() * b);
}
BENCHMARK(BM_Conv1dForward)->Arg(16)->Arg(64);

void BM_BatchNormTrain(benchmark::State& state) {
  const int b = static_cast<int>(state.range(0));
  BatchNorm bn(16);
  Tensor x = random_tensor({b, 16, 14, 54}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(bn.forward(x, Mode::kTrain, false));
  state.SetItemsProcessed(state.iterations() * b);
}
BENCHMARK(BM_BatchNormTrain)->Arg(16)->Arg(64);

void BM_LinearForward(benchmark::State& state) {
  const int b = static_cast<int>(state.range(0));
  Linear fc(224, 60);
  fc.weight = random_tensor(fc.weight.shape(), 1);
  fc.bias = random_tensor(fc.bias.shape(), 2);
  Tensor x = random_tensor({b, 224}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(fc.forward(x));
  state.SetItemsProcessed(state.iterations() * b);
}
BENCHMARK(BM_LinearForward)->Arg(64);

void BM_LossCE(benchmark::State& state) {
  const int b = static_cast<int>(state.range(0));
  const ClassGrid grid;
  ClassWeights w = class_weights({10, 40, 70, 100}, grid);
  SmoothedTargets targets(grid);
  Tensor logits = random_tensor({b, 128}, 5);
  std::vector<int> labels(b);
  for (int64_t i = 0; i < b; ++i) labels[i] = static_cast<int>((i * 37) % 128);
  for (auto _ : state) benchmark::DoNotOptimize(ce_batch(logits, labels, w));
  state.SetItemsProcessed(state.iterations() * b);
}
BENCHMARK(BM_LossCE)->Arg(64);

void BM_LossCL(benchmark::State& state) {
  const int b = static_cast<int>(state.range(0));
  const ClassGrid grid;
  ClassWeights w = class_weights({10, 40, 70, 100}, grid);
  SmoothedTargets targets(grid);
  Tensor logits = random_tensor({b, 128}, 5);
  std::vector<int> labels(b);
  for (int64_t i = 0; i < b; ++i) labels[i] = static_cast<int>((i * 37) % 128);
  for (auto _ : state) benchmark::DoNotOptimize(cl_batch(logits, labels, w, targets));
  state.SetItemsProcessed(state.iterations() * b);
}
BENCHMARK(BM_LossCL)->Arg(64);

// One full optimizer-free training step of the CL+F network.
void BM_ModelStep(benchmark::State& state) {
  const int b = static_cast<int>(state.range(0));
  ModelSpec spec = ModelSpec::classification(true);
  Model model(spec, 42);
  const ClassGrid grid;
  ClassWeights w = class_weights({10, 40, 70, 100}, grid);
  SmoothedTargets targets(grid);
  Tensor x = random_tensor({b, 1, 18, 64}, 6);
  std::vector<int> labels(b);
  for (int64_t i = 0; i < b; ++i) labels[i] = static_cast<int>((i * 53) % 128);
  for (auto _ : state) {
    Tensor out = model.forward(x, Mode::kTrain);
    LossResult loss = cl_batch(out, labels, w, targets);
    benchmark::DoNotOptimize(model.backward(loss.grad));
  }
  state.SetItemsProcessed(state.iterations() * b);
}
BENCHMARK(BM_ModelStep)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ModelInference(benchmark::State& state) {
  const int b = static_cast<int>(state.range(0));
  ModelSpec spec = ModelSpec::classification(true);
  Model model(spec, 42);
  Tensor x = random_tensor({b, 1, 18, 64}, 6);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(x, Mode::kEval));
  state.SetItemsProcessed(state.iterations() * b);
}
BENCHMARK(BM_ModelInference)->Arg(1)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  init_threads_from_env();
  benchmark::Initialize(&argc, argv);
  benchmark::RunSpecifiedBenchmarks();
  return 0;
}
