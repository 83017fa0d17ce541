#pragma once

#include <span>
#include <vector>

#include "swiftband/space.hpp"
#include "swiftband/trial.hpp"

namespace swiftband {

/// normalized HPs ++ first e curve values ++ their e-1 first differences.
using FeatureVector = std::vector<double>;

inline std::size_t feature_length(std::size_t hp_dim, int observe_epoch) {
  return hp_dim + 2 * static_cast<std::size_t>(observe_epoch) - 1;
}

FeatureVector extract_features(const HyperparameterConfig& config, std::span<const double> curve_prefix,
                               const SearchSpace& space);

/// Features of `trial` as seen after `observe_epoch` epochs. Throws
/// std::invalid_argument if the curve is shorter than `observe_epoch`, the
/// epoch is < 1 or beyond `target_epoch`.
FeatureVector extract_features(const Trial& trial, int observe_epoch, const SearchSpace& space, int target_epoch);

}  // namespace swiftband
