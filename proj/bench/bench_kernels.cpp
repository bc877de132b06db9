#include <random>

#include <benchmark/benchmark.h>

#include "topocp/fixtures.hpp"
#include "topocp/kernels.hpp"
#include "topocp/loss.hpp"
#include "topocp/patches.hpp"
#include "topocp/persistence.hpp"
#include "topocp/reference.hpp"

using namespace topocp;

namespace {

// Noisy ball, roughly the texture of a thresholded segmentation.
BinaryMask blob(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::bernoulli_distribution flip(0.02);
  BinaryMask m(Shape(n, n, n));
  const double c = 0.5 * static_cast<double>(n - 1), r2 = 0.16 * static_cast<double>(n * n);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const Coord p = m.shape().coords(i);
    double d = 0.0;
    for (int a = 0; a < 3; ++a) d += (static_cast<double>(p[a]) - c) * (static_cast<double>(p[a]) - c);
    m.set(i, (d < r2) != flip(rng));
  }
  return m;
}

template <auto Fn>
void bm_confusion(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto a = blob(n, 1), b = blob(n, 2);
  for (auto _ : st) benchmark::DoNotOptimize(Fn(a, b));
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * a.size()));
}

template <auto Fn>
void bm_unary(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto a = blob(n, 1);
  for (auto _ : st) benchmark::DoNotOptimize(Fn(a));
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * a.size()));
}

template <auto Fn>
void bm_edt(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto a = blob(n, 1);
  const Spacing sp{1.0, 1.0, 2.0};
  for (auto _ : st) benchmark::DoNotOptimize(Fn(a, sp));
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * a.size()));
}

template <auto Fn>
void bm_directed(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto a = blob(n, 1);
  const auto d = kernels::squared_edt(blob(n, 2), {1.0, 1.0, 1.0});
  for (auto _ : st) benchmark::DoNotOptimize(Fn(a, d));
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * a.size()));
}

void bm_aggregate(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto m = blob(n, 3);
  Grid<double> vol(m.shape());
  for (std::size_t i = 0; i < m.size(); ++i) vol[i] = m[i] ? 1.0 : 0.0;
  PatchSpec spec;
  spec.size = 32;
  spec.stride = 16;
  spec.standardize = false;
  const auto patches = extract_patches(vol, m, spec);
  for (auto _ : st) benchmark::DoNotOptimize(aggregate(patches, m.shape()));
  st.counters["patches"] = static_cast<double>(patches.size());
}

void bm_patch_topo_loss(benchmark::State& st) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto target = fixtures::square_ring(64, 12, 3);
  std::vector<double> v(target.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.6 * (target[i] ? 1.0 : 0.0) + 0.4 * u(rng);
  const LikelihoodGrid f(target.shape(), std::move(v));
  LossConfig cfg;
  for (auto _ : st) benchmark::DoNotOptimize(topo_loss(f, target, cfg));
}

}  // namespace

BENCHMARK(bm_confusion<kernels::confusion>)->Name("confusion/kernel")->Arg(64)->Arg(128);
BENCHMARK(bm_confusion<reference::confusion>)->Name("confusion/reference")->Arg(64)->Arg(128);
BENCHMARK(bm_unary<kernels::euler_characteristic>)->Name("euler/kernel")->Arg(64)->Arg(128);
BENCHMARK(bm_unary<reference::euler_characteristic>)->Name("euler/reference")->Arg(64)->Arg(128);
BENCHMARK(bm_unary<kernels::border>)->Name("border/kernel")->Arg(64)->Arg(128);
BENCHMARK(bm_unary<reference::border>)->Name("border/reference")->Arg(64)->Arg(128);
BENCHMARK(bm_edt<kernels::squared_edt>)->Name("edt/kernel")->Arg(64)->Arg(128);
BENCHMARK(bm_edt<reference::squared_edt>)->Name("edt/reference")->Arg(64)->Arg(128);
BENCHMARK(bm_directed<kernels::directed_distance>)->Name("directed_distance/kernel")->Arg(128);
BENCHMARK(bm_directed<reference::directed_distance>)->Name("directed_distance/reference")->Arg(128);
BENCHMARK(bm_aggregate)->Name("aggregate")->Arg(64)->Arg(96);
BENCHMARK(bm_patch_topo_loss)->Name("topo_loss/64x64")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
