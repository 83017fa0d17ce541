#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swiftband/space.hpp"

namespace swiftband {

using TrialId = std::int64_t;

enum class Direction { minimize, maximize };

std::string_view to_string(Direction direction);
Direction direction_from_string(std::string_view text);

/// Orders two metric values: `less` means `a` is better than `b`.
/// Throws std::invalid_argument on non-finite input.
std::weak_ordering compare_metric(double a, double b, Direction direction);

inline bool is_better(double a, double b, Direction direction) {
  return compare_metric(a, b, direction) < 0;
}

/// Per-epoch metric values. values[e - 1] is the metric after epoch e.
struct LearningCurve {
  std::string metric_name;
  Direction direction = Direction::minimize;
  std::vector<double> values;

  int epochs() const { return static_cast<int>(values.size()); }
  double at_epoch(int epoch) const { return values.at(static_cast<std::size_t>(epoch - 1)); }
  double last() const { return values.back(); }
};

enum class TrialStatus {
  pending,
  running,
  paused,
  terminated_by_predictor,
  eliminated_by_round,
  completed,
};

std::string_view to_string(TrialStatus status);
bool is_terminal(TrialStatus status);

class Trial {
 public:
  Trial(TrialId id, HyperparameterConfig config, std::string metric_name, Direction direction,
        std::optional<std::size_t> dataset_row = std::nullopt);

  TrialId id() const { return id_; }
  const HyperparameterConfig& config() const { return config_; }
  const LearningCurve& curve() const { return curve_; }
  TrialStatus status() const { return status_; }
  int epochs() const { return curve_.epochs(); }
  /// Row of the replay dataset this trial was drawn from, if any.
  std::optional<std::size_t> dataset_row() const { return dataset_row_; }

  /// pending -> running -> {paused -> running}* -> terminal. running ->
  /// running is a no-op. Anything else throws std::logic_error.
  void set_status(TrialStatus next);

  /// Appends observed epochs. Only legal while running.
  void extend(std::span<const double> segment);

 private:
  TrialId id_;
  HyperparameterConfig config_;
  LearningCurve curve_;
  TrialStatus status_ = TrialStatus::pending;
  std::optional<std::size_t> dataset_row_;
};

/// Trial whose last curve value is best; ties go to the lowest id. Trials
/// with empty curves are skipped. Throws std::invalid_argument if none remain.
TrialId best_trial(std::span<const Trial> trials, Direction direction);

}  // namespace swiftband
