#include "swiftband/features.hpp"

#include <stdexcept>
#include <string>

namespace swiftband {

FeatureVector extract_features(const HyperparameterConfig& config, std::span<const double> prefix,
                               const SearchSpace& space) {
  if (prefix.empty()) throw std::invalid_argument("extract_features: empty curve prefix");
  FeatureVector out = space.normalize(config);
  out.reserve(out.size() + 2 * prefix.size() - 1);
  out.insert(out.end(), prefix.begin(), prefix.end());
  for (std::size_t e = 1; e < prefix.size(); ++e) out.push_back(prefix[e] - prefix[e - 1]);
  return out;
}

FeatureVector extract_features(const Trial& trial, int observe_epoch, const SearchSpace& space, int target_epoch) {
  if (observe_epoch < 1 || observe_epoch > target_epoch)
    throw std::invalid_argument("extract_features: observe epoch " + std::to_string(observe_epoch) +
                                " outside [1, " + std::to_string(target_epoch) + "]");
  if (trial.epochs() < observe_epoch)
    throw std::invalid_argument("extract_features: trial " + std::to_string(trial.id()) + " has " +
                                std::to_string(trial.epochs()) + " epochs, need " + std::to_string(observe_epoch));
  const auto& values = trial.curve().values;
  return extract_features(trial.config(), std::span(values.data(), static_cast<std::size_t>(observe_epoch)), space);
}

}  // namespace swiftband
