// Parallel kernels against their serial reference versions.
// Run with e.g. OMP_NUM_THREADS=4 ./yseg_bench; the ".../threads:N" variants
// pin the OpenMP team size explicitly.

#include <benchmark/benchmark.h>

#include <random>

#include "yseg/label_transform.hpp"
#include "yseg/losses.hpp"
#include "yseg/parallel.hpp"
#include "yseg/reference.hpp"
#include "yseg/scene.hpp"
#include "yseg/simulators.hpp"
#include "yseg/softmax.hpp"

namespace {

using namespace yseg;

InstanceLabelMap blob_scene(std::size_t side) {
  SceneSpec s;
  s.kind = SceneKind::random_blobs;
  s.dims = {side, side};
  s.blob_count = side / 8;
  s.radius_min = 3;
  s.radius_max = 7;
  s.min_separation = 1;
  s.seed = 7;
  return generate_scene(s);
}

LogitField random_logits(const GridShape& shape, std::size_t channels) {
  LogitField t(shape, channels, 0.0);
  std::mt19937_64 gen(11);
  std::normal_distribution<double> nd;
  for (auto& v : t.values()) v = nd(gen);
  return t;
}

void threads_arg(benchmark::internal::Benchmark* b) {
  b->ArgName("threads");
  for (int n = 1; n <= parallel::max_threads(); n *= 2) b->Arg(n);
}

void BM_to_semantic(benchmark::State& st) {
  parallel::set_threads(static_cast<int>(st.range(0)));
  const auto g = blob_scene(256);
  TransformConfig cfg;
  for (auto _ : st) benchmark::DoNotOptimize(to_semantic(g, cfg));
}
BENCHMARK(BM_to_semantic)->Apply(threads_arg)->Unit(benchmark::kMillisecond);

void BM_to_semantic_reference(benchmark::State& st) {
  const auto g = blob_scene(256);
  TransformConfig cfg;
  for (auto _ : st) benchmark::DoNotOptimize(reference::to_semantic(g, cfg));
}
BENCHMARK(BM_to_semantic_reference)->Unit(benchmark::kMillisecond);

void BM_softmax(benchmark::State& st) {
  parallel::set_threads(static_cast<int>(st.range(0)));
  const auto t = random_logits(GridShape{512, 512}, 4);
  for (auto _ : st) benchmark::DoNotOptimize(softmax(t));
}
BENCHMARK(BM_softmax)->Apply(threads_arg)->Unit(benchmark::kMillisecond);

void BM_softmax_reference(benchmark::State& st) {
  const auto t = random_logits(GridShape{512, 512}, 4);
  for (auto _ : st) benchmark::DoNotOptimize(reference::softmax(t));
}
BENCHMARK(BM_softmax_reference)->Unit(benchmark::kMillisecond);

void BM_jc_loss(benchmark::State& st) {
  parallel::set_threads(static_cast<int>(st.range(0)));
  const auto h = to_semantic(blob_scene(256), TransformConfig{});
  const auto target = Target::from_semantic(h, 4);
  const auto z = softmax(random_logits(h.shape(), 4));
  const auto w = PairWeights::uniform(4);
  for (auto _ : st) benchmark::DoNotOptimize(evaluate_loss(LossId::jc, target, z, w, true));
}
BENCHMARK(BM_jc_loss)->Apply(threads_arg)->Unit(benchmark::kMillisecond);

void BM_jc_loss_reference(benchmark::State& st) {
  const auto h = to_semantic(blob_scene(256), TransformConfig{});
  const auto y = one_hot(h, 4);
  const auto z = softmax(random_logits(h.shape(), 4));
  const auto w = PairWeights::uniform(4);
  for (auto _ : st) benchmark::DoNotOptimize(reference::loss_value(LossId::jc, y, z, w));
}
BENCHMARK(BM_jc_loss_reference)->Unit(benchmark::kMillisecond);

void BM_imbalance_sim(benchmark::State& st) {
  parallel::set_threads(static_cast<int>(st.range(0)));
  ImbalanceSimConfig cfg;
  cfg.trials = 50;
  cfg.seed = 3;
  cfg.classifier = ClassifierKind::c3;
  for (auto _ : st) benchmark::DoNotOptimize(run_imbalance_sim(cfg));
}
BENCHMARK(BM_imbalance_sim)->Apply(threads_arg)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
