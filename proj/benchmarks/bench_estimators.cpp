// Microbenchmarks for the hot paths: single fits at the canned over-identified
// scale, the leave-one-out JIVE routes, projector application, and the
// Monte-Carlo engine end to end.

#include <benchmark/benchmark.h>

#include <cstdint>

#include "weakiv/diagnostics.hpp"
#include "weakiv/estimators.hpp"
#include "weakiv/projection.hpp"
#include "weakiv/simulation.hpp"

namespace {

weakiv::IVDataset canned(int model, std::uint64_t seed = 99) {
  return weakiv::generate(weakiv::model_preset(model), seed);
}

void BM_FitOls(benchmark::State& state) {
  const auto d = canned(3);
  for (auto _ : state) benchmark::DoNotOptimize(weakiv::fit_ols(d));
}
BENCHMARK(BM_FitOls);

void BM_Fit2sls(benchmark::State& state) {
  const auto d = canned(3);
  for (auto _ : state) benchmark::DoNotOptimize(weakiv::fit_2sls(d));
}
BENCHMARK(BM_Fit2sls);

void BM_FitLiml(benchmark::State& state) {
  const auto d = canned(3);
  for (auto _ : state) benchmark::DoNotOptimize(weakiv::fit_liml(d));
}
BENCHMARK(BM_FitLiml);

void BM_FitJiveAccelerated(benchmark::State& state) {
  const auto d = canned(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        weakiv::fit_jive(d, weakiv::JiveMethod::Accelerated));
  }
}
BENCHMARK(BM_FitJiveAccelerated);

void BM_FitJiveNaive(benchmark::State& state) {
  const auto d = canned(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(weakiv::fit_jive(d, weakiv::JiveMethod::Naive));
  }
}
BENCHMARK(BM_FitJiveNaive);

void BM_ProjectorBuild(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  weakiv::DGPConfig cfg = weakiv::model_preset(3);
  cfg.n = n;
  const auto d = weakiv::generate(cfg, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(weakiv::Projector(d.z()));
  }
}
BENCHMARK(BM_ProjectorBuild)->Arg(200)->Arg(2000);

void BM_ProjectorApply(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  weakiv::DGPConfig cfg = weakiv::model_preset(3);
  cfg.n = n;
  const auto d = weakiv::generate(cfg, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(d.pz().apply(d.y()));
  }
}
BENCHMARK(BM_ProjectorApply)->Arg(200)->Arg(2000);

void BM_FirstStageF(benchmark::State& state) {
  const auto d = canned(3);
  for (auto _ : state) benchmark::DoNotOptimize(weakiv::first_stage_f(d));
}
BENCHMARK(BM_FirstStageF);

void BM_ArConfidenceSet(benchmark::State& state) {
  const auto d = canned(1);
  const auto grid = weakiv::default_ar_grid(d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(weakiv::ar_confidence_set(d, 0.05, grid));
  }
}
BENCHMARK(BM_ArConfidenceSet);

void BM_RunMc(benchmark::State& state) {
  const int workers = static_cast<int>(state.range(0));
  const weakiv::DGPConfig cfg = weakiv::model_preset(1);
  const std::vector<weakiv::Estimator> ests{
      weakiv::Estimator::Ols, weakiv::Estimator::Tsls,
      weakiv::Estimator::Liml, weakiv::Estimator::Jive};
  for (auto _ : state) {
    benchmark::DoNotOptimize(weakiv::run_mc(cfg, 200, ests, 42, workers));
  }
}
BENCHMARK(BM_RunMc)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
