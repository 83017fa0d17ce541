#pragma once

#include <span>
#include <vector>

#include "swiftband/trial.hpp"

namespace swiftband {

struct PredictionEval {
  std::vector<double> truth;
  std::vector<double> predicted;

  std::vector<double> residuals() const;
  double truth_mean() const;
};

/// Coefficient of determination 1 - sum e_i^2 / sum (y_i - mean)^2.
/// Throws std::invalid_argument for mismatched or < 2 samples and when the
/// truth has zero variance.
double r_squared(const PredictionEval& eval);
double r_squared(std::span<const double> truth, std::span<const double> predicted);

/// q-quantile of `values` ranked best-first under `direction`, with linear
/// interpolation between ranks: q = 0 is the best value, q = 1 the worst.
double quantile(std::vector<double> values, double q, Direction direction);

}  // namespace swiftband
