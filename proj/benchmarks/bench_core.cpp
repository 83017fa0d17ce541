#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "swiftband/anneal.hpp"
#include "swiftband/plan.hpp"
#include "swiftband/qsvr.hpp"
#include "swiftband/runner.hpp"
#include "swiftband/scheduler.hpp"
#include "swiftband/svr.hpp"
#include "swiftband/synthetic.hpp"

using namespace swiftband;

namespace {

const LearningCurveDataset& dataset() {
  static const auto ds = [] {
    std::mt19937_64 rng(1);
    return generate_synthetic(SyntheticSpec{}, rng);
  }();
  return ds;
}

struct Regression {
  std::vector<FeatureVector> X;
  std::vector<double> y;
};

Regression noisy_sine(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> x(-3.0, 3.0);
  std::normal_distribution<double> noise(0.0, 0.1);
  Regression r;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = x(rng);
    r.X.push_back({v, v * v / 9.0});
    r.y.push_back(std::sin(v) + noise(rng));
  }
  return r;
}

void BM_SvrTrain(benchmark::State& state) {
  const auto data = noisy_sine(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(train_svr(data.X, data.y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SvrTrain)->RangeMultiplier(2)->Range(16, 512)->Complexity();

void BM_QsvrTrain(benchmark::State& state) {
  const auto data = noisy_sine(static_cast<std::size_t>(state.range(0)));
  QsvrParams params;
  for (auto _ : state) {
    std::mt19937_64 rng(3);
    benchmark::DoNotOptimize(train_qsvr(data.X, data.y, SvrParams{}, params, rng));
  }
}
BENCHMARK(BM_QsvrTrain)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Anneal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 gen(11);
  std::normal_distribution<double> w(0.0, 1.0);
  QuboMatrix q(n);
  for (std::size_t i = 0; i < n; ++i) {
    q.at(i, i) = w(gen);
    for (std::size_t j = i + 1; j < n; ++j) q.at(i, j) = q.at(j, i) = 0.5 * w(gen);
  }
  AnnealSchedule schedule;
  schedule.restarts = 1;
  for (auto _ : state) {
    std::mt19937_64 rng(5);
    benchmark::DoNotOptimize(simulated_anneal(q, schedule, rng));
  }
}
BENCHMARK(BM_Anneal)->Arg(12)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

void BM_Plan(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(plan_hyperband(static_cast<int>(state.range(0)), 3));
}
BENCHMARK(BM_Plan)->Arg(81)->Arg(6561);

using Algorithm = RunResult (*)(const SchedulerConfig&, const SchedulerContext&);

void BM_Scheduler(benchmark::State& state, Algorithm algorithm, PredictorKind kind) {
  const auto& ds = dataset();
  ReplayRunner runner(ds);
  SchedulerConfig cfg;
  cfg.predictor.kind = kind;
  for (auto _ : state) {
    DatasetSource source(ds, 0);
    benchmark::DoNotOptimize(algorithm(cfg, {&ds.space(), ds.meta().direction, &source, &runner, &runner}));
  }
}
BENCHMARK_CAPTURE(BM_Scheduler, hyperband, run_hyperband, PredictorKind::disabled)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Scheduler, swift_svr, run_swift_hyperband, PredictorKind::svr)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Scheduler, swift_qsvr, run_swift_hyperband, PredictorKind::qsvr)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Scheduler, fast_svr, run_fast_hyperband, PredictorKind::svr)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
