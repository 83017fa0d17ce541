#pragma once

#include <filesystem>
#include <optional>

#include "swiftband/config.hpp"
#include "swiftband/report.hpp"

namespace swiftband {

/// Loads or generates the configured dataset; nullopt when the config only
/// names a search space.
std::optional<LearningCurveDataset> materialize_dataset(const ExperimentConfig& cfg);

/// Largest number of trials any configured algorithm draws in one run.
std::size_t required_trials(const ExperimentConfig& cfg, int max_epochs);

RunResult run_algorithm(Algorithm algorithm, const SchedulerConfig& cfg, const SchedulerContext& ctx);

/// Replaces the in-process replay runner, e.g. with a Coordinator.
struct ExperimentEnvironment {
  TrialRunner* runner = nullptr;
  const GroundTruth* truth = nullptr;
};

/// Runs every (algorithm, run) pair with seed base_seed + run. Within a run
/// every algorithm draws the same trial sequence.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const ExperimentEnvironment& env = {});
ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::optional<LearningCurveDataset>& dataset,
                                const ExperimentEnvironment& env = {});

/// Writes report.csv, report.json and plotdata.csv into `dir`.
void write_experiment_outputs(const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace swiftband
