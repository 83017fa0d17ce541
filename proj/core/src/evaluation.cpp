#include "swiftband/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "swiftband/error.hpp"
#include "swiftband/features.hpp"
#include "swiftband/qsvr.hpp"

namespace swiftband {

PredictorEvalResult evaluate_predictor(const LearningCurveDataset& dataset, const PredictorEvalOptions& options) {
  if (!(options.fraction > 0.0 && options.fraction < 1.0))
    throw ConfigError("fraction must be in (0,1); at 1 the final value would be an input");
  if (!(options.train_share > 0.0 && options.train_share < 1.0)) throw ConfigError("train share must be in (0,1)");
  if (options.predictor.kind == PredictorKind::disabled) throw ConfigError("predictor kind must not be disabled");

  const int T = dataset.meta().target_epoch;
  PredictorEvalResult result;
  result.observe_epoch = std::max(1, static_cast<int>(std::ceil(options.fraction * T)));
  if (result.observe_epoch >= T) throw ConfigError("fraction leaves no epochs to predict");

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(options.split_seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto split = static_cast<std::size_t>(std::floor(options.train_share * static_cast<double>(order.size())));
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(split));
  const std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(split), order.end());
  std::size_t cap = train.size();
  if (options.train_cap) cap = std::min(cap, *options.train_cap);
  if (options.predictor.kind == PredictorKind::qsvr) cap = std::min(cap, options.predictor.qsvr.sample_cap);
  train.resize(cap);
  if (train.size() < 2 || test.size() < 2)
    throw DataError("dataset of " + std::to_string(dataset.size()) + " rows is too small for a train/test split");
  result.train_size = train.size();
  result.test_size = test.size();

  const auto& space = dataset.space();
  const auto observe = static_cast<std::size_t>(result.observe_epoch);
  auto features = [&](std::size_t row) {
    const auto& curve = dataset.row(row).curve;
    return extract_features(dataset.row(row).config, std::span(curve.data(), observe), space);
  };
  auto base = [&](std::size_t row) {
    return options.predictor.predict_delta ? dataset.row(row).curve[observe - 1] : 0.0;
  };
  auto final_value = [&](std::size_t row) { return dataset.row(row).curve.back(); };

  std::optional<SvrModel> model;
  if (options.predictor.kind != PredictorKind::oracle) {
    std::vector<FeatureVector> X;
    std::vector<double> y;
    for (auto row : train) {
      X.push_back(features(row));
      y.push_back(final_value(row) - base(row));
    }
    std::mt19937_64 anneal_rng(options.split_seed ^ 0x9e3779b97f4a7c15ULL);
    model = options.predictor.kind == PredictorKind::qsvr
                ? train_qsvr(X, y, options.predictor.svr, options.predictor.qsvr, anneal_rng)
                : train_svr(X, y, options.predictor.svr);
  }
  for (auto row : test) {
    result.eval.truth.push_back(final_value(row));
    result.eval.predicted.push_back(model ? base(row) + model->predict(features(row)) : final_value(row));
  }
  result.r2 = r_squared(result.eval);
  return result;
}

}  // namespace swiftband
