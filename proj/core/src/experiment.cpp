#include "swiftband/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <memory>

#include "swiftband/error.hpp"

namespace swiftband {

std::optional<LearningCurveDataset> materialize_dataset(const ExperimentConfig& cfg) {
  if (!cfg.dataset) return std::nullopt;
  if (cfg.dataset->path) return load_dataset(*cfg.dataset->path);
  std::mt19937_64 rng(cfg.dataset->seed);
  return generate_synthetic(*cfg.dataset->synthetic, rng);
}

std::size_t required_trials(const ExperimentConfig& cfg, int max_epochs) {
  std::size_t needed = 0;
  for (auto algorithm : cfg.algorithms) {
    const auto sc = cfg.scheduler_for(algorithm, max_epochs, cfg.base_seed);
    const auto count = algorithm == Algorithm::threshold_search
                           ? static_cast<std::size_t>(sc.baseline_total)
                           : static_cast<std::size_t>(planned_trials(plan_hyperband(sc.max_epochs, sc.eta)));
    needed = std::max(needed, count);
  }
  return needed;
}

RunResult run_algorithm(Algorithm algorithm, const SchedulerConfig& cfg, const SchedulerContext& ctx) {
  switch (algorithm) {
    case Algorithm::hyperband: return run_hyperband(cfg, ctx);
    case Algorithm::fast: return run_fast_hyperband(cfg, ctx);
    case Algorithm::swift_svr:
    case Algorithm::swift_qsvr: return run_swift_hyperband(cfg, ctx);
    case Algorithm::threshold_search: return run_threshold_search(cfg, ctx);
  }
  throw ConfigError("unknown algorithm");
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const ExperimentEnvironment& env) {
  cfg.validate();
  return run_experiment(cfg, materialize_dataset(cfg), env);
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::optional<LearningCurveDataset>& dataset,
                                const ExperimentEnvironment& env) {
  cfg.validate();
  SearchSpace space;
  ExperimentReport report;
  int max_epochs = 81;
  if (dataset) {
    space = dataset->space();
    report.metric_name = dataset->meta().metric_name;
    report.direction = dataset->meta().direction;
    max_epochs = dataset->meta().target_epoch;
  } else if (cfg.space) {
    space = SearchSpace(cfg.space->dims);
    report.metric_name = cfg.space->metric_name;
    report.direction = cfg.space->direction;
  } else {
    throw ConfigError("config needs a dataset or a space");
  }

  std::unique_ptr<ReplayRunner> replay;
  TrialRunner* runner = env.runner;
  const GroundTruth* truth = env.truth;
  if (dataset) {
    replay = std::make_unique<ReplayRunner>(*dataset);
    if (runner == nullptr) runner = replay.get();
    if (truth == nullptr) truth = replay.get();
  }
  if (runner == nullptr) throw ConfigError("without a dataset the experiment needs an external runner");

  if (dataset) {
    const auto needed = required_trials(cfg, max_epochs);
    if (dataset->size() < needed)
      throw DataError("dataset has " + std::to_string(dataset->size()) + " rows but one run needs " +
                      std::to_string(needed) + " distinct rows");
    for (auto algorithm : cfg.algorithms)
      if (cfg.scheduler_for(algorithm, max_epochs, 0).max_epochs > max_epochs)
        throw ConfigError("max_epochs exceeds the dataset's target epoch " + std::to_string(max_epochs));
  }

  for (auto algorithm : cfg.algorithms) {
    for (int run = 0; run < cfg.runs; ++run) {
      const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(run);
      const auto sc = cfg.scheduler_for(algorithm, max_epochs, seed);
      std::unique_ptr<TrialSource> source;
      if (dataset)
        source = std::make_unique<DatasetSource>(*dataset, seed);
      else
        source = std::make_unique<SpaceSource>(space, report.metric_name, report.direction, seed);
      SchedulerContext ctx{&space, report.direction, source.get(), runner, truth};

      const auto start = std::chrono::steady_clock::now();
      const auto result = run_algorithm(algorithm, sc, ctx);
      const std::chrono::duration<double, std::milli> took = std::chrono::steady_clock::now() - start;

      RunRecord record;
      record.algorithm = std::string(to_string(algorithm));
      record.run = run;
      record.seed = seed;
      record.best_trial = result.best;
      record.best_metric = result.best_metric;
      record.epochs = result.total_epochs();
      record.wall_time_ms = cfg.record_wall_time ? took.count() : 0.0;
      record.predictor_terminations = static_cast<std::size_t>(std::count_if(
          result.trials.begin(), result.trials.end(),
          [](const Trial& t) { return t.status() == TrialStatus::terminated_by_predictor; }));
      report.runs.push_back(std::move(record));
    }
  }
  summarize_all(report);
  return report;
}

void write_experiment_outputs(const ExperimentReport& report, const std::filesystem::path& dir) {
  emit_report(report, "csv", dir / "report.csv");
  emit_report(report, "json", dir / "report.json");
  emit_plot_data(report, dir / "plotdata.csv");
}

}  // namespace swiftband
