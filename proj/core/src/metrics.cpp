#include "swiftband/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swiftband {

std::vector<double> PredictionEval::residuals() const {
  std::vector<double> out(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) out[i] = truth[i] - predicted[i];
  return out;
}

double PredictionEval::truth_mean() const {
  double sum = 0.0;
  for (double v : truth) sum += v;
  return sum / static_cast<double>(truth.size());
}

double r_squared(std::span<const double> truth, std::span<const double> predicted) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("r_squared: length mismatch");
  if (truth.size() < 2) throw std::invalid_argument("r_squared: need at least 2 samples");
  double mean = 0.0;
  for (double v : truth) mean += v;
  mean /= static_cast<double>(truth.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double e = truth[i] - predicted[i];
    ss_res += e * e;
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  if (ss_tot == 0.0) throw std::invalid_argument("r_squared: ground truth has zero variance");
  return 1.0 - ss_res / ss_tot;
}

double r_squared(const PredictionEval& eval) { return r_squared(eval.truth, eval.predicted); }

double quantile(std::vector<double> values, double q, Direction direction) {
  if (values.empty()) throw std::invalid_argument("quantile: no values");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q outside [0,1]");
  if (direction == Direction::minimize) {
    std::sort(values.begin(), values.end());
  } else {
    std::sort(values.begin(), values.end(), std::greater<>());
  }
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return values[lo];
  return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace swiftband
