#include <benchmark/benchmark.h>

#include "bohm/compiled.hpp"
#include "bohm/ensemble.hpp"
#include "bohm/guidance.hpp"
#include "bohm/integrator.hpp"
#include "bohm/sampling.hpp"

using namespace bohm;

namespace {

const CompiledScenario& exp3() {
  static const CompiledScenario c = compile(builtin_scenario(ScenarioKind::exp3));
  return c;
}

void BM_VelocityField(benchmark::State& state) {
  const auto& c = exp3();
  const WaveFunction& wf = c.timeline.state_at(1.6);
  GuidanceField field(wf);
  Configuration q{20.0, 0.7, 0.0};
  std::vector<double> v(q.size());
  double t = 1.6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(field.velocity(q, t, v));
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(BM_VelocityField);

void BM_VelocityFieldMovingTime(benchmark::State& state) {
  const auto& c = exp3();
  const WaveFunction& wf = c.timeline.state_at(1.6);
  GuidanceField field(wf);
  Configuration q{20.0, 0.7, 0.0};
  std::vector<double> v(q.size());
  double t = 1.0;
  for (auto _ : state) {
    t += 1e-9;
    benchmark::DoNotOptimize(field.velocity(q, t, v));
  }
}
BENCHMARK(BM_VelocityFieldMovingTime);

void BM_IntegrateTrajectory(benchmark::State& state) {
  const auto& c = exp3();
  IntegratorOptions opts;
  opts.dt = 1e-3;
  opts.record_times = {c.spec.t1};
  const Configuration q0 = sample_index(c.timeline.state_at(0.0), 0.0, SamplingPlan{}, 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate_trajectory(c.timeline, q0, c.spec.t0, c.spec.t1, opts));
}
BENCHMARK(BM_IntegrateTrajectory)->Unit(benchmark::kMillisecond);

void BM_SampleInitial(benchmark::State& state) {
  const auto& c = exp3();
  const WaveFunction& wf = c.timeline.state_at(0.0);
  SamplingPlan plan;
  plan.n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_initial(wf, 0.0, plan));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleInitial)->Arg(1000)->Arg(10000);

void BM_Ensemble(benchmark::State& state) {
  const auto& c = exp3();
  SamplingPlan plan;
  plan.n = 64;
  EnsembleOptions opts;
  opts.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_ensemble(c, plan, opts));
}
BENCHMARK(BM_Ensemble)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
