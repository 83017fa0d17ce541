#include "swiftband/predictor_pool.hpp"

#include <algorithm>
#include <cmath>

#include "swiftband/error.hpp"
#include "swiftband/features.hpp"

namespace swiftband {

std::string_view to_string(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::svr: return "svr";
    case PredictorKind::qsvr: return "qsvr";
    case PredictorKind::oracle: return "oracle";
    case PredictorKind::disabled: return "disabled";
  }
  return "?";
}

PredictorKind predictor_kind_from_string(std::string_view text) {
  if (text == "svr") return PredictorKind::svr;
  if (text == "qsvr") return PredictorKind::qsvr;
  if (text == "oracle") return PredictorKind::oracle;
  if (text == "disabled" || text == "none") return PredictorKind::disabled;
  throw ConfigError("unknown predictor kind '" + std::string(text) + "'");
}

PredictorPool::PredictorPool(PredictorSettings settings, const SearchSpace& space, int max_epoch,
                             const GroundTruth* truth, std::uint64_t seed)
    : settings_(std::move(settings)), space_(&space), max_epoch_(max_epoch), truth_(truth), rng_(seed) {
  if (settings_.kind == PredictorKind::oracle && truth_ == nullptr)
    throw ConfigError("the oracle predictor needs a runner with ground-truth curves");
}

void PredictorPool::update(std::span<const Trial> observed, PredictorKey key, bool with_sigma) {
  if (settings_.kind == PredictorKind::disabled || settings_.kind == PredictorKind::oracle) return;

  std::vector<const Trial*> samples;
  for (const auto& trial : observed)
    if (trial.epochs() >= key.target_epoch) samples.push_back(&trial);
  auto& entry = entries_[key];
  const std::size_t count = samples.size();
  if (count < std::max<std::size_t>(settings_.min_samples, 2)) return;
  const bool stale = !entry.model ||
                     static_cast<double>(count) >= settings_.retrain_growth * static_cast<double>(entry.observed);

  if (stale) {
    std::sort(samples.begin(), samples.end(), [](const Trial* a, const Trial* b) { return a->id() < b->id(); });
    if (settings_.kind == PredictorKind::qsvr && samples.size() > settings_.qsvr.sample_cap)
      samples.erase(samples.begin(), samples.end() - static_cast<std::ptrdiff_t>(settings_.qsvr.sample_cap));
    entry = Entry{};
    entry.observed = count;
    for (const Trial* t : samples) {
      entry.inputs.push_back(extract_features(*t, key.decision_epoch, *space_, max_epoch_));
      const double base = settings_.predict_delta ? t->curve().at_epoch(key.decision_epoch) : 0.0;
      entry.targets.push_back(t->curve().at_epoch(key.target_epoch) - base);
    }
    try {
      if (settings_.kind == PredictorKind::qsvr) {
        entry.model = train_qsvr(entry.inputs, entry.targets, settings_.svr, settings_.qsvr, rng_);
      } else {
        entry.model = train_svr(entry.inputs, entry.targets, settings_.svr);
      }
      ++fits_;
    } catch (const std::exception&) {
      entry.model.reset();
      return;
    }
  }
  if (with_sigma && entry.model && !entry.has_sigma) {
    try {
      entry.sigma = entry.targets.size() >= 3 ? loocv_std(entry.inputs, entry.targets, settings_.svr) : 0.0;
      entry.has_sigma = true;
    } catch (const std::exception&) {
      entry.model.reset();
    }
  }
}

std::optional<Prediction> PredictorPool::predict(const Trial& trial, PredictorKey key) const {
  switch (settings_.kind) {
    case PredictorKind::disabled:
      return std::nullopt;
    case PredictorKind::oracle:
      return Prediction{truth_->value_at(trial, key.target_epoch), 0.0};
    default:
      break;
  }
  auto it = entries_.find(key);
  if (it == entries_.end() || !it->second.model) return std::nullopt;
  const auto features = extract_features(trial, key.decision_epoch, *space_, max_epoch_);
  const double base = settings_.predict_delta ? trial.curve().at_epoch(key.decision_epoch) : 0.0;
  const double value = base + it->second.model->predict(features);
  if (!std::isfinite(value)) return std::nullopt;
  return Prediction{value, it->second.sigma};
}

bool PredictorPool::has_model(PredictorKey key) const {
  if (settings_.kind == PredictorKind::oracle) return true;
  auto it = entries_.find(key);
  return it != entries_.end() && it->second.model.has_value();
}

std::size_t PredictorPool::training_size(PredictorKey key) const {
  auto it = entries_.find(key);
  return it == entries_.end() || !it->second.model ? 0 : it->second.targets.size();
}

}  // namespace swiftband
