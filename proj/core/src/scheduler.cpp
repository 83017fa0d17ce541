#include "swiftband/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "swiftband/error.hpp"
#include "swiftband/metrics.hpp"

namespace swiftband {

void SchedulerConfig::validate() const {
  if (eta < 2) throw ConfigError("eta must be >= 2");
  if (max_epochs < eta) throw ConfigError("R must be >= eta");
  if (!(decision_fraction > 0.0 && decision_fraction < 1.0)) throw ConfigError("decision_fraction must be in (0,1)");
  if (!(threshold_quantile > 0.0 && threshold_quantile <= 1.0))
    throw ConfigError("threshold_quantile must be in (0,1]");
  if (pathfinder_min < 1) throw ConfigError("pathfinder_min must be >= 1");
  if (!(fast_termination_prob >= 0.0 && fast_termination_prob <= 1.0))
    throw ConfigError("fast_termination_prob must be in [0,1]");
  if (baseline_full < 2 || baseline_total <= baseline_full)
    throw ConfigError("threshold search needs N > M >= 2");
  if (!(observe_fraction > 0.0 && observe_fraction < 1.0)) throw ConfigError("observe_fraction must be in (0,1)");
  if (predictor.min_samples < 2) throw ConfigError("min_predictor_samples must be >= 2");
  if (!(predictor.retrain_growth >= 1.0)) throw ConfigError("retrain growth must be >= 1");
  if (predictor.qsvr.bits < 1) throw ConfigError("qsvr bits must be >= 1");
  if (predictor.qsvr.sample_cap < 2) throw ConfigError("qsvr sample cap must be >= 2");
  if (!(predictor.svr.C > 0.0) || !(predictor.qsvr.C > 0.0)) throw ConfigError("C must be positive");
  if (!(predictor.svr.epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
}

int SchedulerConfig::pathfinder_count(int live) const {
  const int by_size = (live + 2 * eta - 1) / (2 * eta);
  return std::min(live, std::max(pathfinder_min, by_size));
}

double probability_not_worse(double value, double sigma, double cutoff, Direction direction) {
  const double margin = direction == Direction::minimize ? cutoff - value : value - cutoff;
  if (!(sigma > 0.0)) return margin >= 0.0 ? 1.0 : 0.0;
  return 0.5 * std::erfc(-margin / (sigma * std::sqrt(2.0)));
}

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

enum class Strategy { classical, swift, fast };

class Engine {
 public:
  Engine(const SchedulerConfig& cfg, const SchedulerContext& ctx)
      : cfg_(cfg),
        ctx_(ctx),
        pool_(cfg.predictor, *ctx.space, cfg.max_epochs, ctx.truth, derive_seed(cfg.seed, 2)),
        rng_(derive_seed(cfg.seed, 1)) {}

  RunResult run_brackets(Strategy strategy);
  RunResult run_threshold();

 private:
  Trial& trial(TrialId id) { return result_.trials[static_cast<std::size_t>(id)]; }

  TrialId spawn() {
    const auto id = static_cast<TrialId>(result_.trials.size());
    result_.trials.push_back(ctx_.source->next(id));
    return id;
  }

  double value(TrialId id, int epoch) { return trial(id).curve().at_epoch(epoch); }

  /// One runner batch; trials already at their target are skipped.
  void train(const std::vector<std::pair<TrialId, int>>& targets);

  /// Best first at `epoch`; ties by id.
  std::vector<TrialId> rank(std::vector<TrialId> ids, int epoch) {
    std::stable_sort(ids.begin(), ids.end(), [&](TrialId a, TrialId b) {
      const auto order = compare_metric(value(a, epoch), value(b, epoch), ctx_.direction);
      return order < 0 || (order == 0 && a < b);
    });
    return ids;
  }

  std::vector<TrialId> classical_round(const std::vector<TrialId>& live, int budget);
  std::vector<TrialId> swift_round(const std::vector<TrialId>& live, int previous, const RoundSpec& round,
                                   RoundOutcome& out);
  std::vector<TrialId> fast_round(const std::vector<TrialId>& live, int previous, const RoundSpec& round,
                                  RoundOutcome& out);
  void finish(RunResult& result);

  const SchedulerConfig& cfg_;
  const SchedulerContext& ctx_;
  PredictorPool pool_;
  std::mt19937_64 rng_;
  RunResult result_;
};

void Engine::train(const std::vector<std::pair<TrialId, int>>& targets) {
  std::vector<TrainRequest> batch;
  for (const auto& [id, to] : targets) {
    auto& t = trial(id);
    if (t.epochs() >= to) continue;
    if (to > cfg_.max_epochs) throw RunnerError(id, "scheduler asked for epochs beyond R");
    t.set_status(TrialStatus::running);
    batch.push_back({id, t.config(), t.dataset_row(), t.epochs(), to});
  }
  if (batch.empty()) return;
  auto segments = ctx_.runner->train(batch);
  if (segments.size() != batch.size())
    throw RunnerError(batch.front().trial, "runner returned " + std::to_string(segments.size()) + " segments for " +
                                               std::to_string(batch.size()) + " requests");
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto& r = batch[k];
    if (segments[k].size() != static_cast<std::size_t>(r.to_epoch - r.from_epoch))
      throw RunnerError(r.trial, "runner returned " + std::to_string(segments[k].size()) + " values for epochs [" +
                                     std::to_string(r.from_epoch) + ", " + std::to_string(r.to_epoch) + ")");
    trial(r.trial).extend(segments[k]);
    result_.ledger.add(r.trial, r.from_epoch, r.to_epoch);
  }
}

std::vector<TrialId> Engine::classical_round(const std::vector<TrialId>& live, int budget) {
  std::vector<std::pair<TrialId, int>> targets;
  for (auto id : live) targets.emplace_back(id, budget);
  train(targets);
  return live;
}

std::vector<TrialId> Engine::swift_round(const std::vector<TrialId>& live, int previous, const RoundSpec& round,
                                         RoundOutcome& out) {
  const int n = static_cast<int>(live.size());
  const int decision = previous + static_cast<int>(std::ceil(cfg_.decision_fraction * (round.budget - previous)));
  const int k = cfg_.pathfinder_count(n);
  if (!pool_.enabled() || n <= cfg_.eta || decision >= round.budget || k >= n) return classical_round(live, round.budget);

  std::vector<TrialId> order = live;
  std::shuffle(order.begin(), order.end(), rng_);
  std::vector<TrialId> pathfinders(order.begin(), order.begin() + k);
  std::vector<TrialId> candidates(order.begin() + k, order.end());
  std::sort(pathfinders.begin(), pathfinders.end());
  std::sort(candidates.begin(), candidates.end());
  out.pathfinders = pathfinders;

  // Pathfinders and partial trainings are independent: one batch.
  std::vector<std::pair<TrialId, int>> targets;
  for (auto id : pathfinders) targets.emplace_back(id, round.budget);
  for (auto id : candidates) targets.emplace_back(id, decision);
  train(targets);

  std::vector<double> finals;
  for (auto id : pathfinders) finals.push_back(value(id, round.budget));
  const double threshold = quantile(finals, cfg_.threshold_quantile, ctx_.direction);
  out.threshold = threshold;

  const PredictorKey key{decision, round.budget};
  pool_.update(result_.trials, key);
  std::vector<TrialId> survivors = pathfinders;
  std::vector<std::pair<TrialId, int>> finish_targets;
  for (auto id : candidates) {
    std::optional<Prediction> prediction;
    try {
      prediction = pool_.predict(trial(id), key);
    } catch (const std::exception&) {
      prediction.reset();
    }
    bool terminate = false;
    if (prediction) {
      terminate = compare_metric(prediction->value, threshold, ctx_.direction) > 0;
      result_.decisions.push_back({id, out.bracket, out.round, decision, round.budget, prediction->value,
                                   prediction->sigma, threshold, terminate});
    }
    if (terminate) {
      trial(id).set_status(TrialStatus::terminated_by_predictor);
      out.terminated.push_back(id);
    } else {
      survivors.push_back(id);
      finish_targets.emplace_back(id, round.budget);
    }
  }
  train(finish_targets);
  std::sort(survivors.begin(), survivors.end());
  return survivors;
}

std::vector<TrialId> Engine::fast_round(const std::vector<TrialId>& live, int previous, const RoundSpec& round,
                                        RoundOutcome& out) {
  if (!pool_.enabled() || cfg_.fast_termination_prob <= 0.0) return classical_round(live, round.budget);
  std::vector<TrialId> survivors;
  std::vector<double> finished;
  for (auto id : live) {
    bool terminated = false;
    for (int epoch = previous + 1; epoch <= round.budget; ++epoch) {
      train({{id, epoch}});
      if (epoch == round.budget || finished.empty()) continue;
      const double cutoff = quantile(finished, cfg_.threshold_quantile, ctx_.direction);
      const PredictorKey key{epoch, round.budget};
      std::optional<Prediction> prediction;
      try {
        pool_.update(result_.trials, key, true);
        prediction = pool_.predict(trial(id), key);
      } catch (const std::exception&) {
        prediction.reset();
      }
      if (!prediction) continue;
      const double p = probability_not_worse(prediction->value, prediction->sigma, cutoff, ctx_.direction);
      terminated = p < cfg_.fast_termination_prob;
      result_.decisions.push_back({id, out.bracket, out.round, epoch, round.budget, prediction->value,
                                   prediction->sigma, cutoff, terminated});
      if (terminated) break;
    }
    if (terminated) {
      trial(id).set_status(TrialStatus::terminated_by_predictor);
      out.terminated.push_back(id);
    } else {
      survivors.push_back(id);
      finished.push_back(value(id, round.budget));
    }
  }
  return survivors;
}

RunResult Engine::run_brackets(Strategy strategy) {
  const auto plan = plan_hyperband(cfg_.max_epochs, cfg_.eta);
  for (const auto& bracket : plan) {
    std::vector<TrialId> live;
    for (int i = 0; i < bracket.rounds.front().trials; ++i) live.push_back(spawn());
    int previous = 0;
    for (std::size_t i = 0; i < bracket.rounds.size(); ++i) {
      const auto& round = bracket.rounds[i];
      RoundOutcome out;
      out.bracket = bracket.s;
      out.round = static_cast<int>(i);
      out.budget = round.budget;
      std::vector<TrialId> survivors;
      switch (strategy) {
        case Strategy::classical: survivors = classical_round(live, round.budget); break;
        case Strategy::swift: survivors = swift_round(live, previous, round, out); break;
        case Strategy::fast: survivors = fast_round(live, previous, round, out); break;
      }
      const bool last = i + 1 == bracket.rounds.size();
      auto ranked = rank(survivors, round.budget);
      const std::size_t keep = last ? ranked.size()
                                    : std::min(ranked.size(), static_cast<std::size_t>(bracket.rounds[i + 1].trials));
      for (std::size_t r = 0; r < ranked.size(); ++r) {
        if (r < keep) {
          trial(ranked[r]).set_status(last ? TrialStatus::completed : TrialStatus::paused);
          out.promoted.push_back(ranked[r]);
        } else {
          trial(ranked[r]).set_status(TrialStatus::eliminated_by_round);
          out.eliminated.push_back(ranked[r]);
        }
      }
      std::sort(out.promoted.begin(), out.promoted.end());
      std::sort(out.eliminated.begin(), out.eliminated.end());
      live = out.promoted;
      previous = round.budget;
      result_.rounds.push_back(std::move(out));
      if (live.empty()) break;
    }
  }
  finish(result_);
  return std::move(result_);
}

RunResult Engine::run_threshold() {
  const int T = cfg_.max_epochs;
  const int observe = static_cast<int>(std::ceil(cfg_.observe_fraction * T));
  if (observe >= T) throw ConfigError("observe fraction leaves no epochs to save");
  const bool learned = cfg_.predictor.kind == PredictorKind::svr || cfg_.predictor.kind == PredictorKind::qsvr;
  if (learned && static_cast<std::size_t>(cfg_.baseline_full) < cfg_.predictor.min_samples)
    throw ConfigError("threshold search needs M >= min_predictor_samples (" +
                      std::to_string(cfg_.predictor.min_samples) + ")");

  RoundOutcome out;
  out.bracket = -1;
  out.budget = T;
  std::vector<TrialId> full, partial;
  for (int i = 0; i < cfg_.baseline_full; ++i) full.push_back(spawn());
  for (int i = cfg_.baseline_full; i < cfg_.baseline_total; ++i) partial.push_back(spawn());
  out.pathfinders = full;

  std::vector<std::pair<TrialId, int>> targets;
  for (auto id : full) targets.emplace_back(id, T);
  for (auto id : partial) targets.emplace_back(id, observe);
  train(targets);
  for (auto id : full) {
    trial(id).set_status(TrialStatus::completed);
    out.promoted.push_back(id);
  }

  std::vector<double> finals;
  for (auto id : full) finals.push_back(value(id, T));
  const double threshold = quantile(finals, cfg_.threshold_quantile, ctx_.direction);
  out.threshold = threshold;
  const PredictorKey key{observe, T};
  pool_.update(result_.trials, key);

  std::vector<std::pair<TrialId, int>> finish_targets;
  std::vector<TrialId> accepted;
  for (auto id : partial) {
    std::optional<Prediction> prediction;
    try {
      prediction = pool_.predict(trial(id), key);
    } catch (const std::exception&) {
      prediction.reset();
    }
    bool terminate = false;
    if (prediction) {
      terminate = compare_metric(prediction->value, threshold, ctx_.direction) > 0;
      result_.decisions.push_back({id, -1, 0, observe, T, prediction->value, prediction->sigma, threshold, terminate});
    }
    if (terminate) {
      trial(id).set_status(TrialStatus::terminated_by_predictor);
      out.terminated.push_back(id);
    } else {
      accepted.push_back(id);
      finish_targets.emplace_back(id, T);
    }
  }
  train(finish_targets);
  for (auto id : accepted) {
    trial(id).set_status(TrialStatus::completed);
    out.promoted.push_back(id);
  }
  std::sort(out.promoted.begin(), out.promoted.end());
  result_.rounds.push_back(std::move(out));
  finish(result_);
  return std::move(result_);
}

void Engine::finish(RunResult& result) {
  const Trial* best = nullptr;
  for (const auto& t : result.trials) {
    if (t.status() != TrialStatus::completed) continue;
    if (best == nullptr) {
      best = &t;
      continue;
    }
    const auto order = compare_metric(t.curve().last(), best->curve().last(), ctx_.direction);
    if (order < 0 || (order == 0 && t.id() < best->id())) best = &t;
  }
  if (best == nullptr) throw Error("run finished without a completed trial");
  result.best = best->id();
  result.best_metric = best->curve().last();
  result.predictor_fits = pool_.models_trained();
}

void check_context(const SchedulerContext& ctx) {
  if (ctx.space == nullptr || ctx.source == nullptr || ctx.runner == nullptr)
    throw ConfigError("scheduler context needs a search space, trial source and runner");
}

}  // namespace

RunResult run_hyperband(const SchedulerConfig& cfg, const SchedulerContext& ctx) {
  cfg.validate();
  check_context(ctx);
  SchedulerConfig plain = cfg;
  plain.predictor.kind = PredictorKind::disabled;
  Engine engine(plain, ctx);
  return engine.run_brackets(Strategy::classical);
}

RunResult run_swift_hyperband(const SchedulerConfig& cfg, const SchedulerContext& ctx) {
  cfg.validate();
  check_context(ctx);
  Engine engine(cfg, ctx);
  return engine.run_brackets(Strategy::swift);
}

RunResult run_fast_hyperband(const SchedulerConfig& cfg, const SchedulerContext& ctx) {
  cfg.validate();
  check_context(ctx);
  if (cfg.predictor.kind == PredictorKind::qsvr)
    throw ConfigError("Fast-Hyperband trains a predictor per epoch and cannot use qsvr");
  Engine engine(cfg, ctx);
  return engine.run_brackets(Strategy::fast);
}

RunResult run_threshold_search(const SchedulerConfig& cfg, const SchedulerContext& ctx) {
  cfg.validate();
  check_context(ctx);
  Engine engine(cfg, ctx);
  return engine.run_threshold();
}

}  // namespace swiftband
