#include <benchmark/benchmark.h>

#include "skt/ensemble.hpp"
#include "skt/kalman.hpp"
#include "skt/mcmc.hpp"
#include "skt/models/benchmarks.hpp"
#include "skt/student_t.hpp"

using namespace skt;

namespace {

models::BenchmarkModel model(const std::string& name) {
  models::ModelOptions o;
  o.name = name;
  return models::make_model(o);
}

void forward(benchmark::State& state, const std::string& name) {
  const auto m = model(name);
  const RowMatrix x = sample_prior(m.spec, 1, RngFactory(1));
  const Vector p = x.row(0).transpose();
  for (auto _ : state) benchmark::DoNotOptimize(m.spec.forward(p));
}

void BM_HeatForward(benchmark::State& s) { forward(s, "heat"); }
void BM_GravityForward(benchmark::State& s) { forward(s, "gravity"); }
void BM_ReactionDiffusionForward(benchmark::State& s) { forward(s, "reaction_diffusion"); }

void BM_TFit(benchmark::State& state) {
  const Index j = state.range(0), d = state.range(1);
  Rng rng(2);
  RowMatrix x(j, d);
  for (Index i = 0; i < j; ++i)
    for (Index k = 0; k < d; ++k) x(i, k) = standard_normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(fit_multivariate_t(x));
}

void BM_EkiUpdate(benchmark::State& state) {
  const auto m = model("nonlinear_toy");
  const RngFactory rngs(3);
  const RowMatrix x = sample_prior(m.spec, state.range(0), rngs);
  EvalCounter counter;
  const ForwardBatch b = evaluate_ensemble(m.spec, x, counter);
  for (auto _ : state) benchmark::DoNotOptimize(eki_update(x, b, m.spec, 2.0, rngs, 1));
}

void BM_TpcnStep(benchmark::State& state) {
  const auto m = model("nonlinear_toy");
  const Index d = m.spec.dim;
  const LogTarget target = [&](const Vector& x) { 
    return annealed_log_target(m.spec, x, misfit(m.spec, m.spec.forward(x)), 0.5);
  };
  const TDistParams p = TDistParams::make(5.0, Vector::Zero(d), Matrix::Identity(d, d), 0.3);
  Rng rng(4);
  ChainState s{Vector::Zero(d), target(Vector::Zero(d))};
  for (auto _ : state) s = tpcn_step(s, target, p, rng).state;
}

}  // namespace

BENCHMARK(BM_HeatForward)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GravityForward)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ReactionDiffusionForward)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TFit)->Args({1000, 10})->Args({1030, 103})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EkiUpdate)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_TpcnStep)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
