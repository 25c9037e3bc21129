#include <random>

#include <benchmark/benchmark.h>

#include "tkmp/expr.hpp"
#include "tkmp/moments.hpp"
#include "tkmp/pipeline.hpp"
#include "tkmp/refmeasures.hpp"
#include "tkmp/relax.hpp"

using namespace tkmp;

namespace {

Tms random_tms(int n, int d) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Tms y(n, d);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = g(rng);
  return y;
}

void BM_MomentMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  const Tms y = random_tms(n, 2 * k);
  for (auto _ : state) benchmark::DoNotOptimize(moment_matrix(y, k).entries.data());
  state.SetLabel("size " + std::to_string(monomial_count(n, k)));
}
BENCHMARK(BM_MomentMatrix)->Args({2, 4})->Args({2, 8})->Args({3, 4})->Args({4, 3});

void BM_LocalizingAssemble(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  const Tms y = random_tms(n, 2 * k);
  const LocalizingStructure s = localizing_structure(parse_polynomial("1 - x1^2 - x2^2", n), k - 1);
  for (auto _ : state) benchmark::DoNotOptimize(assemble(s, y).data());
}
BENCHMARK(BM_LocalizingAssemble)->Args({2, 5})->Args({3, 4});

// lambda relaxation on a disk of radius 25, the sextic data scaled by the pipeline rule
void BM_SolveLambdaDisk(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  Eigen::VectorXd v(28);
  v << 28, 0, 0, 1.1, 0, 3.4, 0, 0, 0, 0, 1.1, 0, 1.2, 0, 1.6, 0, 0, 0, 0, 0, 0, 28, 0, 3.4, 0, 1.6, 0, 1.2;
  const Tms y(2, 6, v);
  SemialgebraicSet K(2);
  K.add_inequality(parse_polynomial("625 - x1^2 - x2^2", 2));
  const Scaling sc = choose_scaling(y);
  const Relaxation r = build_lambda(scale_tms(y, sc), scale_tms(ball_uniform_moments(2, 6), sc, false),
                                    scale_set(K, sc.coord), k, FamilyMode::quadratic_module);
  const SdpOptions opt = PipelineOptions{}.sdp;
  for (auto _ : state) benchmark::DoNotOptimize(solve(r.sdp, opt).x.data());
}
BENCHMARK(BM_SolveLambdaDisk)->DenseRange(3, 6)->Unit(benchmark::kMillisecond);

void BM_FlatSearchBox(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  const BenchInstance inst = make_bench_instance(n, d, BenchKind::box, 0, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_measure(inst.y, inst.K, false, {ObjectiveKind::seeded_random, 0, {}}).kind);
  }
}
BENCHMARK(BM_FlatSearchBox)->Args({2, 4})->Args({3, 4})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
