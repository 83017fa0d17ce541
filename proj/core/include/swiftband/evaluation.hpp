#pragma once

#include <cstdint>
#include <optional>

#include "swiftband/dataset.hpp"
#include "swiftband/metrics.hpp"
#include "swiftband/predictor_pool.hpp"

namespace swiftband {

struct PredictorEvalOptions {
  double fraction = 0.25;  ///< of the target epoch, in (0, 1)
  double train_share = 0.8;
  std::uint64_t split_seed = 0;
  PredictorSettings predictor;
  /// Keep only the first n training rows of the shuffled split. qsvr is
  /// always capped at its sample cap.
  std::optional<std::size_t> train_cap;
};

struct PredictorEvalResult {
  int observe_epoch = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double r2 = 0.0;
  PredictionEval eval;  ///< held-out truth and predictions
};

/// Fits the predictor on features at ceil(fraction * T) against the final
/// value and scores it on the held-out rows. Throws ConfigError on a bad
/// fraction and DataError when the split leaves fewer than 2 rows a side.
PredictorEvalResult evaluate_predictor(const LearningCurveDataset& dataset, const PredictorEvalOptions& options);

}  // namespace swiftband
