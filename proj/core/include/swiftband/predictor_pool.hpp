#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string_view>

#include "swiftband/qsvr.hpp"
#include "swiftband/runner.hpp"
#include "swiftband/svr.hpp"

namespace swiftband {

enum class PredictorKind { svr, qsvr, oracle, disabled };

std::string_view to_string(PredictorKind kind);
PredictorKind predictor_kind_from_string(std::string_view text);

struct PredictorSettings {
  PredictorKind kind = PredictorKind::svr;
  std::size_t min_samples = 10;
  /// Retrain once the sample count reaches this multiple of the last fit.
  double retrain_growth = 1.25;
  /// Regress the change from the decision epoch to the target epoch rather
  /// than the target value itself.
  bool predict_delta = true;
  SvrParams svr;
  QsvrParams qsvr;
};

/// Features observed up to `decision_epoch` predict the value at
/// `target_epoch`.
struct PredictorKey {
  int decision_epoch = 0;
  int target_epoch = 0;

  auto operator<=>(const PredictorKey&) const = default;
};

struct Prediction {
  double value = 0.0;
  double sigma = 0.0;  ///< LOOCV residual std; 0 for the oracle
};

/// Predictors trained on the fly from every trial observed so far in a run.
/// The model for a key is fit on all trials whose curves reach
/// `target_epoch` (for qsvr, the `sample_cap` most recent by trial id).
class PredictorPool {
 public:
  PredictorPool(PredictorSettings settings, const SearchSpace& space, int max_epoch, const GroundTruth* truth,
                std::uint64_t seed);

  const PredictorSettings& settings() const { return settings_; }
  bool enabled() const { return settings_.kind != PredictorKind::disabled; }

  /// Refits the model for `key` when none exists yet and enough samples are
  /// available, or when the sample count grew by the retrain factor.
  /// `with_sigma` also estimates the LOOCV spread. Fitting failures leave
  /// the key without a model.
  void update(std::span<const Trial> observed, PredictorKey key, bool with_sigma = false);

  /// nullopt when the key has no model (or the predictor is disabled).
  std::optional<Prediction> predict(const Trial& trial, PredictorKey key) const;

  bool has_model(PredictorKey key) const;
  /// Samples the current model for `key` was trained on (0 if none).
  std::size_t training_size(PredictorKey key) const;
  std::size_t models_trained() const { return fits_; }

 private:
  struct Entry {
    std::size_t observed = 0;  ///< sample count at the last fit
    std::vector<FeatureVector> inputs;
    std::vector<double> targets;
    std::optional<SvrModel> model;
    double sigma = 0.0;
    bool has_sigma = false;
  };

  PredictorSettings settings_;
  const SearchSpace* space_;
  int max_epoch_;
  const GroundTruth* truth_;
  std::mt19937_64 rng_;
  std::map<PredictorKey, Entry> entries_;
  std::size_t fits_ = 0;
};

}  // namespace swiftband
