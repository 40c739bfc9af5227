#include <benchmark/benchmark.h>

#include <map>

#include "refine/duality.hpp"
#include "refine/fixtures.hpp"

using namespace refine;

namespace {

const HoareFixture& hoare() {
  static const HoareFixture h = build_hoare(hoare_two_state());
  return h;
}

const LinctxFixture& linear(std::size_t K) {
  static std::map<std::size_t, LinctxFixture> cache;
  auto it = cache.find(K);
  if (it == cache.end()) it = cache.emplace(K, build_linctx(linear_example(), {K})).first;
  return it->second;
}

}  // namespace

static void BM_BuildHoare(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_hoare(hoare_two_state()));
}
BENCHMARK(BM_BuildHoare);

static void BM_BuildLinear(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_linctx(linear_example(), {static_cast<std::size_t>(state.range(0))}));
}
BENCHMARK(BM_BuildLinear)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

static void BM_RandomSystem(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(random_refsys(seed++));
}
BENCHMARK(BM_RandomSystem);

static void BM_PushRepresentation(benchmark::State& state) {
  const auto& fx = linear(3);
  RepresentationContext ctx(fx.system);
  auto F = ctx.pos().action(fx.one.multiplication);
  auto pair = *fx.context({0, 1});
  const auto& phi = ctx.pos().rep(pair)->presheaf;
  for (auto _ : state) benchmark::DoNotOptimize(push_psh(F, phi));
}
BENCHMARK(BM_PushRepresentation)->Unit(benchmark::kMicrosecond);

static void BM_CountFamilies(benchmark::State& state) {
  RepresentationContext ctx(hoare().system);
  const auto& P = ctx.pos().rep(0)->presheaf;
  const auto& Q = ctx.pos().rep(3)->presheaf;
  for (auto _ : state) benchmark::DoNotOptimize(count_families(P, Q));
}
BENCHMARK(BM_CountFamilies);

static void BM_DualLeft(benchmark::State& state) {
  const auto& fx = linear(static_cast<std::size_t>(state.range(0)));
  DualityContext ctx(fx.system);
  ObjId one = fx.system->T().cod(fx.one.unit);
  const auto& phi = ctx.reps().pos().rep(*fx.context({2}))->presheaf;
  for (auto _ : state) benchmark::DoNotOptimize(dual_left(ctx, one, phi));
}
BENCHMARK(BM_DualLeft)->DenseRange(2, 3)->Unit(benchmark::kMillisecond);

static void BM_RepresentationFF(benchmark::State& state) {
  for (auto _ : state) {
    RepresentationContext ctx(hoare().system);
    benchmark::DoNotOptimize(representation_ff_check(ctx));
  }
}
BENCHMARK(BM_RepresentationFF)->Unit(benchmark::kMillisecond);

static void BM_DualityHoare(benchmark::State& state) {
  for (auto _ : state) {
    DualityContext ctx(hoare().system);
    benchmark::DoNotOptimize(duality_check_all(ctx, static_cast<unsigned>(state.range(0))));
  }
}
BENCHMARK(BM_DualityHoare)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_GendayLattice(benchmark::State& state) {
  auto L = lattice_example();
  for (auto _ : state) {
    RepresentationContext ctx(L.system);
    benchmark::DoNotOptimize(genday_check_all(ctx, L.monoidal));
  }
}
BENCHMARK(BM_GendayLattice)->Unit(benchmark::kMillisecond);

static void BM_CrossCheckLattice(benchmark::State& state) {
  auto L = lattice_example();
  for (auto _ : state) {
    DualityContext ctx(L.system);
    benchmark::DoNotOptimize(dual_cross_check(ctx, 300));
  }
}
BENCHMARK(BM_CrossCheckLattice)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
