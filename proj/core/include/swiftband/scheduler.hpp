#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "swiftband/plan.hpp"
#include "swiftband/predictor_pool.hpp"
#include "swiftband/runner.hpp"

namespace swiftband {

struct SchedulerConfig {
  int max_epochs = 81;  ///< R
  int eta = 3;
  /// Swift decision epoch, as a fraction of the round's epoch span.
  double decision_fraction = 0.25;
  /// k(n) = max(pathfinder_min, ceil(n / (2 * eta))).
  int pathfinder_min = 2;
  double threshold_quantile = 0.5;
  PredictorSettings predictor;
  /// Fast-Hyperband stops a trial when P(beating the round cutoff) < this.
  double fast_termination_prob = 0.05;
  /// Threshold search: `baseline_full` (M) of `baseline_total` (N) trials are
  /// trained fully, the rest to `observe_fraction` of R.
  int baseline_full = 10;
  int baseline_total = 40;
  double observe_fraction = 0.25;
  std::uint64_t seed = 0;

  /// Throws ConfigError.
  void validate() const;
  int pathfinder_count(int live) const;
};

/// Everything a scheduler needs from its environment.
struct SchedulerContext {
  const SearchSpace* space = nullptr;
  Direction direction = Direction::minimize;
  TrialSource* source = nullptr;
  TrialRunner* runner = nullptr;
  const GroundTruth* truth = nullptr;  ///< required only by the oracle predictor
};

/// One predictor-driven decision about one trial.
struct Decision {
  TrialId trial = 0;
  int bracket = 0;  ///< -1 for threshold search
  int round = 0;
  int decision_epoch = 0;
  int target_epoch = 0;
  double predicted = 0.0;
  double sigma = 0.0;
  double threshold = 0.0;
  bool terminated = false;
};

struct RoundOutcome {
  int bracket = 0;
  int round = 0;
  int budget = 0;
  std::vector<TrialId> pathfinders;
  std::vector<TrialId> terminated;  ///< by the predictor
  std::vector<TrialId> promoted;    ///< or completed, in a final round
  std::vector<TrialId> eliminated;  ///< by the round's ranking
  std::optional<double> threshold;
};

struct RunResult {
  TrialId best = -1;
  double best_metric = 0.0;
  std::vector<Trial> trials;  ///< indexed by id
  EpochLedger ledger;
  std::vector<RoundOutcome> rounds;
  std::vector<Decision> decisions;
  std::size_t predictor_fits = 0;

  long total_epochs() const { return ledger.total(); }
};

/// Classical Hyperband over `plan_hyperband(R, eta)`.
RunResult run_hyperband(const SchedulerConfig& cfg, const SchedulerContext& ctx);

/// Hyperband with one predictor decision point per round: pathfinders run to
/// the round end and fix a threshold; the other trials stop at the decision
/// epoch unless their predicted round-end value is not worse than it.
RunResult run_swift_hyperband(const SchedulerConfig& cfg, const SchedulerContext& ctx);

/// Hyperband with a probabilistic predictor check after every epoch, trials
/// processed strictly one at a time. Rejects the qsvr predictor.
RunResult run_fast_hyperband(const SchedulerConfig& cfg, const SchedulerContext& ctx);

/// Train M trials fully, the remaining N - M to the observe fraction, and
/// finish only those predicted not worse than the q-quantile of the M finals.
RunResult run_threshold_search(const SchedulerConfig& cfg, const SchedulerContext& ctx);

/// Probability that a prediction N(value, sigma^2) ends up at least as good
/// as `cutoff`. With sigma == 0 this is 1 or 0.
double probability_not_worse(double value, double sigma, double cutoff, Direction direction);

}  // namespace swiftband
