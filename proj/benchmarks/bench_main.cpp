#include <benchmark/benchmark.h>

#include <memory>

#include "snippet_smc/engine.hpp"
#include "snippet_smc/gaussian_model.hpp"
#include "snippet_smc/logistic_model.hpp"
#include "snippet_smc/random_stream.hpp"
#include "snippet_smc/resampling.hpp"
#include "snippet_smc/snippet.hpp"

using namespace snippet_smc;

namespace {

LogisticRegressionTarget synthetic_logistic(int n_obs, int d) {
  RandomStream rng(7);
  Matrix design(n_obs, d);
  Vector labels(n_obs);
  for (int i = 0; i < n_obs; ++i) {
    design(i, 0) = 1.0;
    for (int j = 1; j < d; ++j) design(i, j) = rng.uniform();
    labels[i] = (rng.uniform() < 0.5) ? 1.0 : -1.0;
  }
  Vector scales = Vector::Constant(d, 5.0);
  scales[0] = 20.0;
  return {std::move(design), std::move(labels), std::move(scales)};
}

void BM_philox_normal(benchmark::State& state) {
  RandomStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(rng.normal());
}
BENCHMARK(BM_philox_normal);

void BM_logistic_bundle(benchmark::State& state) {
  const auto target = synthetic_logistic(208, 61);
  RandomStream rng(2);
  Vector x(61);
  for (int i = 0; i < 61; ++i) x[i] = rng.normal();
  double ll = 0.0;
  Vector grad(61);
  for (auto _ : state) {
    target.likelihood_bundle(x, ll, grad);
    benchmark::DoNotOptimize(ll);
    benchmark::DoNotOptimize(grad.data());
  }
}
BENCHMARK(BM_logistic_bundle);

void BM_leapfrog_snippet(benchmark::State& state) {
  const auto T = static_cast<int>(state.range(0));
  auto target = std::make_shared<const GaussianTarget>(Vector::Constant(32, 1.0));
  auto family = std::make_shared<const TemperedFamily>(
      std::static_pointer_cast<const TemperedTarget>(target));
  const auto step = make_leapfrog(family, 1.0);
  VelocityLaw vel(32);
  SnippetDensities dens;
  dens.log_mu_next = [&](const PhaseState& z, const StepContext& ctx) {
    return (ctx.has_log_pi ? ctx.log_pi : family->log_pi(1.0, z.x)) + vel.log_density(z.v);
  };
  dens.log_mu_prev = [&](const PhaseState& z) {
    return family->log_pi(1.0, z.x) + vel.log_density(z.v);
  };
  RandomStream rng(3);
  PhaseState z0{Vector::Zero(32), Vector::Zero(32)};
  for (int i = 0; i < 32; ++i) {
    z0.x[i] = rng.normal();
    z0.v[i] = rng.normal();
  }
  for (auto _ : state) {
    const auto s = build_snippet(*step, 0.1, T, z0, dens);
    benchmark::DoNotOptimize(s.log_w.data());
  }
  state.SetItemsProcessed(state.iterations() * (T + 1));
}
BENCHMARK(BM_leapfrog_snippet)->Arg(8)->Arg(32)->Arg(128);

void BM_multinomial_resample(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomStream rng(4);
  std::vector<double> logw(n);
  for (auto& w : logw) w = rng.normal();
  for (auto _ : state) {
    RandomStream draw = rng.substream(17);
    benchmark::DoNotOptimize(resample_multinomial(logw, n / 8, draw));
  }
}
BENCHMARK(BM_multinomial_resample)->Arg(1 << 10)->Arg(1 << 14);

void BM_engine_iteration(benchmark::State& state) {
  auto target = std::make_shared<const GaussianTarget>(Vector::Constant(16, 1.0),
                                                       Vector::Constant(16, 1.0));
  auto family = std::make_shared<const TemperedFamily>(
      std::static_pointer_cast<const TemperedTarget>(target));
  EngineConfig cfg;
  cfg.n_particles = 256;
  cfg.T = 16;
  cfg.epsilon.fixed = {0.1};
  cfg.seed = 5;
  for (auto _ : state) {
    SnippetSmcEngine engine(family, {leapfrog_integrator(family)}, cfg);
    RandomStream root(5);
    RandomStream init = root.substream(0);
    ParticleCloud cloud = engine.initialize(init);
    RandomStream iter = root.substream(1);
    benchmark::DoNotOptimize(engine.run_iteration(cloud, 0.5, cfg.T, iter));
  }
}
BENCHMARK(BM_engine_iteration);

}  // namespace

BENCHMARK_MAIN();
