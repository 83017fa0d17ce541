#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles/hyperband_hand.hpp"
#include "support/fixtures.hpp"
#include "swiftband/error.hpp"
#include "swiftband/metrics.hpp"
#include "swiftband/plan.hpp"
#include "swiftband/scheduler.hpp"

using namespace swiftband;
using swiftband::testing::SequentialSource;

namespace {

/// Curves a + b / e for the given coefficient pairs.
LearningCurveDataset hyperbolic(const std::vector<std::pair<double, double>>& coefficients, int epochs) {
  std::vector<std::vector<double>> curves;
  for (const auto& [a, b] : coefficients) {
    std::vector<double> c;
    for (int e = 1; e <= epochs; ++e) c.push_back(a + b / e);
    curves.push_back(std::move(c));
  }
  return swiftband::testing::make_dataset(curves);
}

std::vector<std::pair<double, double>> spread_coefficients(int count) {
  std::vector<std::pair<double, double>> out;
  for (int i = 0; i < count; ++i) {
    // Scrambled so id order and quality order differ.
    const int p = (i * 7 + 3) % count;
    const int q = (i * 5 + 1) % count;
    out.emplace_back(0.05 + 0.02 * p, 0.1 + 0.05 * q);
  }
  return out;
}

struct Harness {
  explicit Harness(const LearningCurveDataset& dataset, std::uint64_t seed = 0)
      : ds(dataset), runner(dataset), source(dataset, seed) {}

  SchedulerContext context() { return {&ds.space(), ds.meta().direction, &source, &runner, &runner}; }

  const LearningCurveDataset& ds;
  ReplayRunner runner;
  DatasetSource source;
};

struct SequentialHarness {
  explicit SequentialHarness(const LearningCurveDataset& dataset) : ds(dataset), runner(dataset), source(dataset) {}

  SchedulerContext context() { return {&ds.space(), ds.meta().direction, &source, &runner, &runner}; }

  const LearningCurveDataset& ds;
  ReplayRunner runner;
  SequentialSource source;
};

double truth(const LearningCurveDataset& ds, const Trial& t, int epoch) {
  return ds.row(*t.dataset_row()).curve.at(static_cast<std::size_t>(epoch - 1));
}

void check_same_run(const RunResult& a, const RunResult& b) {
  CHECK(a.best == b.best);
  CHECK(a.best_metric == b.best_metric);
  CHECK(a.ledger.total() == b.ledger.total());
  CHECK(a.ledger.per_trial() == b.ledger.per_trial());
  REQUIRE(a.rounds.size() == b.rounds.size());
  for (std::size_t r = 0; r < a.rounds.size(); ++r) {
    CHECK(a.rounds[r].promoted == b.rounds[r].promoted);
    CHECK(a.rounds[r].eliminated == b.rounds[r].eliminated);
    CHECK(a.rounds[r].terminated == b.rounds[r].terminated);
  }
  REQUIRE(a.trials.size() == b.trials.size());
  for (std::size_t t = 0; t < a.trials.size(); ++t) CHECK(a.trials[t].dataset_row() == b.trials[t].dataset_row());
}

/// Ledger, per-trial budget and promotion-count invariants of any bracket run.
void check_bracket_invariants(const RunResult& run, const SchedulerConfig& cfg) {
  long recount = 0;
  for (const auto& t : run.trials) {
    CHECK(t.epochs() <= cfg.max_epochs);
    recount += t.epochs();
    const auto it = run.ledger.per_trial().find(t.id());
    CHECK((it == run.ledger.per_trial().end() ? 0 : it->second) == t.epochs());
  }
  CHECK(recount == run.ledger.total());

  const auto plan = plan_hyperband(cfg.max_epochs, cfg.eta);
  std::size_t index = 0;
  for (const auto& bracket : plan) {
    for (std::size_t i = 0; i < bracket.rounds.size() && index < run.rounds.size(); ++i, ++index) {
      const auto& out = run.rounds[index];
      REQUIRE(out.bracket == bracket.s);
      const auto alive = out.promoted.size() + out.eliminated.size();
      if (i + 1 < bracket.rounds.size()) {
        CHECK(out.promoted.size() == std::min<std::size_t>(alive, static_cast<std::size_t>(bracket.rounds[i + 1].trials)));
      } else {
        CHECK(out.eliminated.empty());
      }
      if (out.promoted.empty()) {
        // A bracket emptied by terminations stops early.
        while (i + 1 < bracket.rounds.size()) ++i;
      }
    }
  }
  CHECK(index == run.rounds.size());
}

}  // namespace

TEST_CASE("plan for R=81, eta=3 matches the hand evaluation") {
  const auto plan = plan_hyperband(81, 3);
  const auto& hand = oracle::r81_eta3_rounds();
  REQUIRE(plan.size() == hand.size());
  for (std::size_t b = 0; b < plan.size(); ++b) {
    CHECK(plan[b].s == static_cast<int>(plan.size() - 1 - b));
    REQUIRE(plan[b].rounds.size() == hand[b].size());
    for (std::size_t i = 0; i < hand[b].size(); ++i)
      CHECK(plan[b].rounds[i] == RoundSpec{hand[b][i].first, hand[b][i].second});
    CHECK(planned_epochs(plan[b]) == oracle::kR81Eta3BracketEpochs[b]);
  }
  CHECK(planned_epochs(plan) == oracle::kR81Eta3TotalEpochs);
  CHECK(planned_trials(plan) == oracle::kR81Eta3TotalTrials);
}

TEST_CASE("small plans") {
  SUBCASE("R equals eta") {
    // s_max = 1: s=1 has n = ceil(2/2 * 3) = 3 at r = 1; s=0 has n = 2 at r = 3.
    const auto plan = plan_hyperband(3, 3);
    REQUIRE(plan.size() == 2);
    CHECK(plan[0].rounds == std::vector<RoundSpec>{{3, 1}, {1, 3}});
    CHECK(plan[1].rounds == std::vector<RoundSpec>{{2, 3}});
    CHECK(planned_epochs(plan) == 3 + 2 + 6);
  }
  SUBCASE("eta 2, R 2") {
    const auto plan = plan_hyperband(2, 2);
    REQUIRE(plan.size() == 2);
    CHECK(plan[0].rounds == std::vector<RoundSpec>{{2, 1}, {1, 2}});
    CHECK(plan[1].rounds == std::vector<RoundSpec>{{2, 2}});
  }
  SUBCASE("R not a power of eta") {
    // s_max = 2; budgets floor(10 * 3^i / 9).
    const auto plan = plan_hyperband(10, 3);
    REQUIRE(plan.size() == 3);
    CHECK(plan[0].rounds == std::vector<RoundSpec>{{9, 1}, {3, 3}, {1, 10}});
    CHECK(plan[1].rounds == std::vector<RoundSpec>{{5, 3}, {1, 10}});
    CHECK(plan[2].rounds == std::vector<RoundSpec>{{3, 10}});
  }
  SUBCASE("invalid inputs") {
    CHECK_THROWS_AS(plan_hyperband(81, 1), ConfigError);
    CHECK_THROWS_AS(plan_hyperband(2, 3), ConfigError);
    CHECK_THROWS_AS(plan_hyperband(0, 2), ConfigError);
  }
  SUBCASE("bracket invariants") {
    for (int eta : {2, 3, 4}) {
      for (int R : {eta, 9, 16, 27, 81, 100}) {
        if (R < eta) continue;
        for (const auto& b : plan_hyperband(R, eta)) {
          for (std::size_t i = 1; i < b.rounds.size(); ++i) {
            CHECK(b.rounds[i].trials < b.rounds[i - 1].trials);
            CHECK(b.rounds[i].budget > b.rounds[i - 1].budget);
          }
          CHECK(b.rounds.back().budget <= R);
          CHECK(b.rounds.back().trials >= 1);
        }
      }
    }
  }
}

TEST_CASE("hyperband by hand: R=4, eta=2 on ten fixed curves") {
  // Brackets: s=2 (4,1),(2,2),(1,4); s=1 (3,2),(1,4); s=0 (3,4).
  const auto ds = swiftband::testing::make_dataset({
      {0.9, 0.8, 0.7, 0.6},
      {0.5, 0.45, 0.4, 0.35},
      {0.6, 0.3, 0.2, 0.1},
      {0.7, 0.6, 0.5, 0.4},
      {0.8, 0.25, 0.2, 0.15},
      {0.4, 0.35, 0.1, 0.05},
      {0.3, 0.25, 0.24, 0.23},
      {1.0, 1.0, 1.0, 0.1},
      {0.5, 0.5, 0.5, 0.5},
      {0.2, 0.2, 0.2, 0.2},
  });
  SequentialHarness h(ds);
  SchedulerConfig cfg;
  cfg.max_epochs = 4;
  cfg.eta = 2;
  const auto run = run_hyperband(cfg, h.context());

  REQUIRE(run.rounds.size() == 6);
  // Epoch 1 values 0.9, 0.5, 0.6, 0.7: keep 1 and 2.
  CHECK(run.rounds[0].promoted == std::vector<TrialId>{1, 2});
  CHECK(run.rounds[0].eliminated == std::vector<TrialId>{0, 3});
  // Epoch 2 values 0.45, 0.3.
  CHECK(run.rounds[1].promoted == std::vector<TrialId>{2});
  CHECK(run.rounds[1].eliminated == std::vector<TrialId>{1});
  CHECK(run.rounds[2].promoted == std::vector<TrialId>{2});
  // Trials 4 and 6 tie at 0.25; the lower id is promoted.
  CHECK(run.rounds[3].promoted == std::vector<TrialId>{4});
  CHECK(run.rounds[3].eliminated == std::vector<TrialId>{5, 6});
  CHECK(run.rounds[4].promoted == std::vector<TrialId>{4});
  CHECK(run.rounds[5].promoted == std::vector<TrialId>{7, 8, 9});
  // Trials 2 and 7 both finish at 0.1.
  CHECK(run.best == 2);
  CHECK(run.best_metric == 0.1);
  CHECK(run.ledger.total() == 28);
  const std::map<TrialId, long> per_trial{{0, 1}, {1, 2}, {2, 4}, {3, 1}, {4, 4},
                                          {5, 2}, {6, 2}, {7, 4}, {8, 4}, {9, 4}};
  CHECK(run.ledger.per_trial() == per_trial);
  CHECK(run.trials[0].status() == TrialStatus::eliminated_by_round);
  CHECK(run.trials[2].status() == TrialStatus::completed);
  CHECK(run.decisions.empty());
}

TEST_CASE("single-bracket hyperband trains one trial fully") {
  // R = eta = 2: brackets (2,1),(1,2) and (2,2).
  const auto ds = swiftband::testing::make_dataset({{0.5, 0.4}, {0.6, 0.1}, {0.3, 0.2}, {0.9, 0.8}});
  SequentialHarness h(ds);
  SchedulerConfig cfg;
  cfg.max_epochs = 2;
  cfg.eta = 2;
  const auto run = run_hyperband(cfg, h.context());
  CHECK(run.ledger.total() == 2 + 1 + 4);
  CHECK(run.best == 2);
  CHECK(run.rounds[0].promoted == std::vector<TrialId>{0});
}

TEST_CASE("hyperband on the default synthetic data uses the planned budget") {
  const auto ds = swiftband::testing::default_synthetic();
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    Harness h(ds, seed);
    SchedulerConfig cfg;
    cfg.seed = seed;
    const auto run = run_hyperband(cfg, h.context());
    CHECK(run.ledger.total() == oracle::kR81Eta3TotalEpochs);
    CHECK(run.trials.size() == static_cast<std::size_t>(oracle::kR81Eta3TotalTrials));
    check_bracket_invariants(run, cfg);
    const auto& best = run.trials[static_cast<std::size_t>(run.best)];
    CHECK(best.status() == TrialStatus::completed);
    CHECK(best.epochs() == 81);
  }
}

TEST_CASE("swift round by hand: six trials, two pathfinders, oracle predictor") {
  // R = 8, eta = 2. Bracket s=3 uses rows 0-7; bracket s=2 starts six trials
  // (rows 8-13) with rounds (6,2),(3,4),(1,8). Its first round decides at
  // epoch 0 + ceil(0.25 * 2) = 1 with k = max(2, ceil(6/4)) = 2.
  const auto ds = hyperbolic(spread_coefficients(22), 8);
  SequentialHarness h(ds);
  SchedulerConfig cfg;
  cfg.max_epochs = 8;
  cfg.eta = 2;
  cfg.predictor.kind = PredictorKind::oracle;
  const auto run = run_swift_hyperband(cfg, h.context());

  // s=3 rounds never split: budgets 1 and 2 leave no decision epoch.
  for (int r = 0; r < 4; ++r) CHECK(run.rounds[static_cast<std::size_t>(r)].pathfinders.empty());
  const auto& round = run.rounds[4];
  REQUIRE(round.bracket == 2);
  REQUIRE(round.round == 0);
  REQUIRE(round.pathfinders.size() == 2);
  for (auto id : round.pathfinders) CHECK((id >= 8 && id <= 13));

  std::vector<double> finals;
  for (auto id : round.pathfinders) finals.push_back(ds.row(static_cast<std::size_t>(id)).curve[1]);
  const double threshold = 0.5 * (finals[0] + finals[1]);
  REQUIRE(round.threshold.has_value());
  CHECK(*round.threshold == doctest::Approx(threshold));

  std::vector<TrialId> expected_terminated;
  std::vector<std::pair<double, TrialId>> alive;
  for (TrialId id = 8; id <= 13; ++id) {
    const double end = ds.row(static_cast<std::size_t>(id)).curve[1];
    const bool pathfinder = std::find(round.pathfinders.begin(), round.pathfinders.end(), id) != round.pathfinders.end();
    if (!pathfinder && end > *round.threshold) {
      expected_terminated.push_back(id);
      CHECK(run.ledger.per_trial().at(id) == 1);
    } else {
      alive.emplace_back(end, id);
    }
  }
  CHECK(round.terminated == expected_terminated);
  std::sort(alive.begin(), alive.end());
  std::vector<TrialId> expected_promoted;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, alive.size()); ++i) expected_promoted.push_back(alive[i].second);
  std::sort(expected_promoted.begin(), expected_promoted.end());
  CHECK(round.promoted == expected_promoted);
  check_bracket_invariants(run, cfg);
}

TEST_CASE("swift with the predictor disabled is hyperband") {
  const auto ds = swiftband::testing::default_synthetic();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CAPTURE(seed);
    SchedulerConfig cfg;
    cfg.seed = seed;
    cfg.predictor.kind = PredictorKind::disabled;
    Harness a(ds, seed), b(ds, seed);
    const auto hb = run_hyperband(cfg, a.context());
    const auto swift = run_swift_hyperband(cfg, b.context());
    check_same_run(hb, swift);
    CHECK(swift.decisions.empty());
  }
}

TEST_CASE("oracle predictor with q=1 never terminates a trial that beats the threshold") {
  const auto ds = swiftband::testing::default_synthetic(3);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CAPTURE(seed);
    Harness h(ds, seed);
    SchedulerConfig cfg;
    cfg.seed = seed;
    cfg.threshold_quantile = 1.0;
    cfg.predictor.kind = PredictorKind::oracle;
    const auto run = run_swift_hyperband(cfg, h.context());
    for (const auto& d : run.decisions) {
      const auto& t = run.trials[static_cast<std::size_t>(d.trial)];
      const double end = truth(ds, t, d.target_epoch);
      CHECK(d.predicted == end);
      CHECK(d.terminated == (end > d.threshold));
    }
    for (const auto& out : run.rounds) {
      if (!out.threshold) continue;
      double worst = -INFINITY;
      for (auto id : out.pathfinders) worst = std::max(worst, run.trials[static_cast<std::size_t>(id)].curve().at_epoch(out.budget));
      CHECK(*out.threshold == worst);
      for (auto id : out.terminated) CHECK(truth(ds, run.trials[static_cast<std::size_t>(id)], out.budget) > worst);
    }
    check_bracket_invariants(run, cfg);
  }
}

TEST_CASE("swift with svr never trains more than hyperband and keeps the invariants") {
  const auto ds = swiftband::testing::default_synthetic();
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    CAPTURE(seed);
    SchedulerConfig cfg;
    cfg.seed = seed;
    Harness a(ds, seed), b(ds, seed);
    const auto hb = run_hyperband(cfg, a.context());
    const auto swift = run_swift_hyperband(cfg, b.context());
    CHECK(swift.ledger.total() <= hb.ledger.total());
    CHECK(swift.predictor_fits > 0);
    CHECK_FALSE(swift.decisions.empty());
    check_bracket_invariants(swift, cfg);
    for (const auto& d : swift.decisions) {
      CHECK(d.decision_epoch < d.target_epoch);
      CHECK(d.terminated == (d.predicted > d.threshold));
    }
    const auto& best = swift.trials[static_cast<std::size_t>(swift.best)];
    CHECK(best.status() == TrialStatus::completed);
    CHECK(swift.best_metric == best.curve().last());
  }
}

TEST_CASE("swift runs with the qsvr predictor") {
  const auto ds = swiftband::testing::default_synthetic();
  Harness h(ds, 4);
  SchedulerConfig cfg;
  cfg.seed = 4;
  cfg.max_epochs = 27;
  cfg.predictor.kind = PredictorKind::qsvr;
  cfg.predictor.qsvr.schedule.sweeps = 300;
  cfg.predictor.qsvr.schedule.restarts = 3;
  const auto run = run_swift_hyperband(cfg, h.context());
  CHECK(run.predictor_fits > 0);
  check_bracket_invariants(run, cfg);
}

TEST_CASE("schedulers are deterministic per seed") {
  const auto ds = swiftband::testing::default_synthetic();
  SchedulerConfig cfg;
  cfg.seed = 12;
  Harness a(ds, 12), b(ds, 12);
  check_same_run(run_swift_hyperband(cfg, a.context()), run_swift_hyperband(cfg, b.context()));
}

TEST_CASE("probability of not being worse") {
  CHECK(probability_not_worse(1.0, 0.0, 2.0, Direction::minimize) == 1.0);
  CHECK(probability_not_worse(2.0, 0.0, 2.0, Direction::minimize) == 1.0);
  CHECK(probability_not_worse(3.0, 0.0, 2.0, Direction::minimize) == 0.0);
  CHECK(probability_not_worse(3.0, 0.0, 2.0, Direction::maximize) == 1.0);
  CHECK(probability_not_worse(2.0, 1.0, 2.0, Direction::minimize) == doctest::Approx(0.5));
  // Standard normal CDF at 1.
  CHECK(probability_not_worse(0.0, 1.0, 1.0, Direction::minimize) == doctest::Approx(0.8413447460685429));
  CHECK(probability_not_worse(0.0, 1.0, 1.0, Direction::maximize) == doctest::Approx(1.0 - 0.8413447460685429));
  CHECK(probability_not_worse(0.0, 0.5, 1.0, Direction::minimize) == doctest::Approx(0.9772498680518208));
}

TEST_CASE("fast-hyperband degenerate settings reproduce hyperband") {
  const auto ds = swiftband::testing::default_synthetic();
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    CAPTURE(seed);
    SchedulerConfig cfg;
    cfg.seed = seed;
    Harness a(ds, seed);
    const auto hb = run_hyperband(cfg, a.context());

    SchedulerConfig zero = cfg;
    zero.fast_termination_prob = 0.0;
    Harness b(ds, seed);
    const auto fast_zero = run_fast_hyperband(zero, b.context());
    check_same_run(hb, fast_zero);
    for (const auto& d : fast_zero.decisions) CHECK_FALSE(d.terminated);

    SchedulerConfig off = cfg;
    off.predictor.kind = PredictorKind::disabled;
    Harness c(ds, seed);
    check_same_run(hb, run_fast_hyperband(off, c.context()));
  }
}

TEST_CASE("fast-hyperband rejects qsvr") {
  const auto ds = swiftband::testing::default_synthetic();
  Harness h(ds);
  SchedulerConfig cfg;
  cfg.predictor.kind = PredictorKind::qsvr;
  CHECK_THROWS_AS(run_fast_hyperband(cfg, h.context()), ConfigError);
}

TEST_CASE("fast-hyperband with an exact oracle terminates exactly the trials that miss the cutoff") {
  const auto ds = swiftband::testing::default_synthetic(2);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    CAPTURE(seed);
    Harness h(ds, seed);
    SchedulerConfig cfg;
    cfg.seed = seed;
    cfg.predictor.kind = PredictorKind::oracle;
    const auto run = run_fast_hyperband(cfg, h.context());

    // Replay each round sequentially from the hidden curves.
    const auto plan = plan_hyperband(cfg.max_epochs, cfg.eta);
    std::size_t index = 0;
    for (const auto& bracket : plan) {
      int previous = 0;
      for (std::size_t i = 0; i < bracket.rounds.size() && index < run.rounds.size(); ++i, ++index) {
        const auto& out = run.rounds[index];
        std::vector<TrialId> live = out.promoted;
        live.insert(live.end(), out.eliminated.begin(), out.eliminated.end());
        live.insert(live.end(), out.terminated.begin(), out.terminated.end());
        std::sort(live.begin(), live.end());
        std::vector<double> finished;
        std::vector<TrialId> expected;
        for (auto id : live) {
          const auto& t = run.trials[static_cast<std::size_t>(id)];
          const double end = truth(ds, t, out.budget);
          const bool can_decide = !finished.empty() && previous + 1 < out.budget;
          if (can_decide && end > quantile(finished, cfg.threshold_quantile, Direction::minimize)) {
            expected.push_back(id);
            CHECK(run.ledger.per_trial().at(id) == previous + 1);
          } else {
            finished.push_back(end);
          }
        }
        CHECK(out.terminated == expected);
        previous = out.budget;
        if (out.promoted.empty()) break;
      }
    }
    check_bracket_invariants(run, cfg);
  }
}

TEST_CASE("fast-hyperband with svr uses the LOOCV spread") {
  const auto ds = swiftband::testing::default_synthetic();
  Harness h(ds, 1);
  SchedulerConfig cfg;
  cfg.seed = 1;
  cfg.max_epochs = 27;
  const auto run = run_fast_hyperband(cfg, h.context());
  bool spread = false;
  for (const auto& d : run.decisions) {
    if (d.sigma > 0.0) spread = true;
    const double p = probability_not_worse(d.predicted, d.sigma, d.threshold, Direction::minimize);
    CHECK(d.terminated == (p < cfg.fast_termination_prob));
  }
  CHECK(spread);
  check_bracket_invariants(run, cfg);
}

TEST_CASE("threshold search with an oracle and q=1 completes exactly the partials that do not lose") {
  const auto ds = swiftband::testing::default_synthetic(4);
  Harness h(ds, 8);
  SchedulerConfig cfg;
  cfg.seed = 8;
  cfg.threshold_quantile = 1.0;
  cfg.predictor.kind = PredictorKind::oracle;
  const auto run = run_threshold_search(cfg, h.context());
  REQUIRE(run.rounds.size() == 1);
  const auto& out = run.rounds[0];
  double worst = -INFINITY;
  for (TrialId id = 0; id < 10; ++id) worst = std::max(worst, truth(ds, run.trials[static_cast<std::size_t>(id)], 81));
  CHECK(*out.threshold == worst);
  long expected_ledger = 10 * 81;
  for (TrialId id = 10; id < 40; ++id) {
    const auto& t = run.trials[static_cast<std::size_t>(id)];
    const bool keep = truth(ds, t, 81) <= worst;
    CHECK((t.status() == TrialStatus::completed) == keep);
    expected_ledger += keep ? 81 : 21;
  }
  CHECK(run.ledger.total() == expected_ledger);
  CHECK(run.decisions.size() == 30);
}

TEST_CASE("threshold search edge cases") {
  const auto ds = swiftband::testing::default_synthetic();

  SUBCASE("N = M + 1 makes one prediction") {
    Harness h(ds);
    SchedulerConfig cfg;
    cfg.baseline_full = 10;
    cfg.baseline_total = 11;
    const auto run = run_threshold_search(cfg, h.context());
    CHECK(run.decisions.size() == 1);
    CHECK(run.decisions[0].trial == 10);
  }
  SUBCASE("M below the predictor minimum") {
    Harness h(ds);
    SchedulerConfig cfg;
    cfg.baseline_full = 5;
    CHECK_THROWS_AS(run_threshold_search(cfg, h.context()), ConfigError);
    cfg.predictor.kind = PredictorKind::oracle;
    CHECK_NOTHROW(run_threshold_search(cfg, h.context()));
  }
  SUBCASE("M=10, N=40 with svr costs less than training all 40") {
    Harness h(ds, 2);
    SchedulerConfig cfg;
    cfg.seed = 2;
    const auto run = run_threshold_search(cfg, h.context());
    const auto& out = run.rounds[0];
    const long expected = 10 * 81 + 30 * 21 + static_cast<long>(out.promoted.size() - 10) * 60;
    CHECK(run.ledger.total() == expected);
    CHECK_FALSE(out.terminated.empty());
    CHECK(run.ledger.total() < 40 * 81);
  }
}

TEST_CASE("configuration validation") {
  SchedulerConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  auto bad = cfg;
  bad.eta = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.max_epochs = 2;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.decision_fraction = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.threshold_quantile = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.baseline_total = bad.baseline_full;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.fast_termination_prob = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  CHECK(cfg.pathfinder_count(81) == 14);
  CHECK(cfg.pathfinder_count(6) == 2);
  CHECK(cfg.pathfinder_count(1) == 1);

  const auto ds = swiftband::testing::default_synthetic();
  Harness h(ds);
  auto ctx = h.context();
  ctx.runner = nullptr;
  CHECK_THROWS_AS(run_hyperband(cfg, ctx), ConfigError);
}

namespace {

class FailingRunner : public TrialRunner {
 public:
  explicit FailingRunner(TrialRunner& inner, TrialId fail_on) : inner_(&inner), fail_on_(fail_on) {}
  std::vector<CurveSegment> train(std::span<const TrainRequest> batch) override {
    for (const auto& r : batch)
      if (r.trial == fail_on_) throw RunnerError(r.trial, "simulated failure");
    return inner_->train(batch);
  }

 private:
  TrialRunner* inner_;
  TrialId fail_on_;
};

class ShortRunner : public TrialRunner {
 public:
  std::vector<CurveSegment> train(std::span<const TrainRequest> batch) override {
    return std::vector<CurveSegment>(batch.size(), CurveSegment{0.5});
  }
};

}  // namespace

TEST_CASE("runner failures propagate with the trial id") {
  const auto ds = swiftband::testing::default_synthetic();
  Harness h(ds);
  FailingRunner failing(h.runner, 7);
  auto ctx = h.context();
  ctx.runner = &failing;
  try {
    run_swift_hyperband(SchedulerConfig{}, ctx);
    FAIL("expected RunnerError");
  } catch (const RunnerError& e) {
    CHECK(e.trial_id() == 7);
  }

  Harness h2(ds);
  ShortRunner short_runner;
  auto ctx2 = h2.context();
  ctx2.runner = &short_runner;
  SchedulerConfig cfg;
  CHECK_THROWS_AS(run_hyperband(cfg, ctx2), RunnerError);
}
