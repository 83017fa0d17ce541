#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "swiftband/dataset.hpp"
#include "swiftband/synthetic.hpp"
#include "swiftband/trial.hpp"

namespace swiftband {

/// Train `trial` from `from_epoch` (already observed) to `to_epoch`.
struct TrainRequest {
  TrialId trial = 0;
  HyperparameterConfig config;
  std::optional<std::size_t> dataset_row;
  int from_epoch = 0;
  int to_epoch = 0;
};

using CurveSegment = std::vector<double>;

/// Executes batches of independent training requests. Implementations
/// return one segment per request, in request order, each holding exactly
/// to_epoch - from_epoch values, and never reveal values past to_epoch.
class TrialRunner {
 public:
  virtual ~TrialRunner() = default;
  virtual std::vector<CurveSegment> train(std::span<const TrainRequest> batch) = 0;
};

/// Hidden full curves, available only to replay-style runners. The oracle
/// predictor reads from here.
class GroundTruth {
 public:
  virtual ~GroundTruth() = default;
  virtual double value_at(const Trial& trial, int epoch) const = 0;
};

/// Reveals the stored curve of each trial's dataset row.
class ReplayRunner : public TrialRunner, public GroundTruth {
 public:
  explicit ReplayRunner(const LearningCurveDataset& dataset) : dataset_(&dataset) {}

  std::vector<CurveSegment> train(std::span<const TrainRequest> batch) override;
  double value_at(const Trial& trial, int epoch) const override;

  CurveSegment segment(const TrainRequest& request) const;

 private:
  const LearningCurveDataset* dataset_;
};

/// Evaluates the synthetic power-law family directly from a config. Noise is
/// a pure function of (seed, config, epoch), so repeated requests agree.
class SyntheticRunner : public TrialRunner, public GroundTruth {
 public:
  SyntheticRunner(SearchSpace space, CurveFamily family, double noise_sigma, std::uint64_t seed, int max_epoch);

  std::vector<CurveSegment> train(std::span<const TrainRequest> batch) override;
  double value_at(const Trial& trial, int epoch) const override;

  double value(const HyperparameterConfig& config, int epoch) const;

 private:
  SearchSpace space_;
  CurveFamily family_;
  double noise_sigma_;
  std::uint64_t seed_;
  int max_epoch_;
};

/// Runs `/bin/sh -c <command>` per request with HP_<i> and HP_<NAME>,
/// TRIAL_ID, FROM_EPOCH and TO_EPOCH in the environment; the command prints
/// one metric value per line on stdout.
class CommandRunner : public TrialRunner {
 public:
  CommandRunner(std::string command, std::vector<std::string> hp_names = {});

  void set_hp_names(std::vector<std::string> names) { hp_names_ = std::move(names); }
  std::vector<CurveSegment> train(std::span<const TrainRequest> batch) override;

 private:
  CurveSegment run_one(const TrainRequest& request) const;

  std::string command_;
  std::vector<std::string> hp_names_;
};

/// Supplies fresh trials to a scheduler.
class TrialSource {
 public:
  virtual ~TrialSource() = default;
  virtual Trial next(TrialId id) = 0;
};

/// Draws dataset rows (without replacement by default).
class DatasetSource : public TrialSource {
 public:
  DatasetSource(const LearningCurveDataset& dataset, std::uint64_t seed, bool without_replacement = true);
  Trial next(TrialId id) override;

 private:
  const LearningCurveDataset* dataset_;
  RowDrawer drawer_;
};

/// Samples configs from a search space.
class SpaceSource : public TrialSource {
 public:
  SpaceSource(SearchSpace space, std::string metric_name, Direction direction, std::uint64_t seed);
  Trial next(TrialId id) override;

 private:
  SearchSpace space_;
  std::string metric_name_;
  Direction direction_;
  std::mt19937_64 rng_;
};

/// Target-model epochs actually trained in one run.
class EpochLedger {
 public:
  /// Throws std::invalid_argument unless to_epoch > from_epoch >= 0.
  void add(TrialId trial, int from_epoch, int to_epoch);

  long total() const { return total_; }
  const std::map<TrialId, long>& per_trial() const { return per_trial_; }

 private:
  long total_ = 0;
  std::map<TrialId, long> per_trial_;
};

}  // namespace swiftband
