#include <benchmark/benchmark.h>

#include "csmc/diffusion.hpp"
#include "csmc/models.hpp"
#include "csmc/resampling.hpp"
#include "csmc/schemes.hpp"

using namespace csmc;

namespace {

FeynmanKacModel ou_model(int level, int horizon) {
  return make_ou_coupled_model(level, 1.0, {}, std::vector<int>(horizon + 1, 1));
}

CoupledCloud warm_cloud(const FeynmanKacModel& model, int n) {
  CoupledCloud cloud = CoupledCloud::with_size(n, 1);
  const RngStream init = RngStream(7).substream("init", 0);
  for (int i = 0; i < n; ++i) {
    RngStream rng = init.substream("pair", static_cast<std::uint64_t>(i));
    model.sample_init_coupled(cloud.f(i), cloud.c(i), rng);
  }
  return cloud;
}

void BM_philox_u64(benchmark::State& state) {
  RngStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_u64());
}
BENCHMARK(BM_philox_u64);

void BM_normal_draw(benchmark::State& state) {
  RngStream rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(rng.normal());
}
BENCHMARK(BM_normal_draw);

void BM_categorical_draw(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<double> w(n);
  RngStream rng(3);
  for (auto& v : w) v = rng.uniform01();
  const CategoricalSampler cat(w);
  for (auto _ : state) benchmark::DoNotOptimize(cat.draw(rng));
}
BENCHMARK(BM_categorical_draw)->Arg(1000)->Arg(100000);

void BM_mixture_eval(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const FeynmanKacModel model = ou_model(5, 1);
  const CoupledCloud cloud = warm_cloud(model, n);
  std::vector<double> weights(n, 1.0 / n);
  const MixtureView mix{cloud.xs_f.data(), weights.data(), n, 1};
  const MixtureDensityFn dens = make_mixture_density(model, 1, Side::f, mix);
  const double x = 0.3;
  for (auto _ : state)
    benchmark::DoNotOptimize(dens(ConstStateView{&x, 1}));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_mixture_eval)->Arg(1000)->Arg(5000)->Arg(100000);

void BM_euler_coupled_step(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  DiffusionSpec spec;
  spec.dim = 1;
  spec.start = {1.0};
  spec.drift = [](ConstStateView x, StateView out) { out[0] = -1.5 * x[0]; };
  spec.diffusion = [](ConstStateView, StateView out) { out[0] = 1.0; };
  std::vector<double> f(1), c(1);
  RngStream rng(4);
  for (auto _ : state) {
    euler_coupled_unit_step(spec.start, spec.start, level, spec, f, c, rng);
    benchmark::DoNotOptimize(f[0] + c[0]);
  }
}
BENCHMARK(BM_euler_coupled_step)->Arg(3)->Arg(7);

void BM_scheme_step(benchmark::State& state) {
  const auto scheme = static_cast<SchemeId>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const FeynmanKacModel model = ou_model(4, 2);
  const CoupledCloud cloud = warm_cloud(model, n);
  const RngStream step = RngStream(5).substream("step", 1);
  for (auto _ : state) {
    auto [out, diag] = scheme_step(scheme, cloud, model, 1, step);
    benchmark::DoNotOptimize(out.xs_f[0]);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_scheme_step)
    ->Args({static_cast<long>(SchemeId::IR), 2000})
    ->Args({static_cast<long>(SchemeId::MCR), 2000})
    ->Args({static_cast<long>(SchemeId::W), 2000})
    ->Args({static_cast<long>(SchemeId::MC), 2000});

}  // namespace

BENCHMARK_MAIN();
