#include "swiftband/trial.hpp"

#include <cmath>
#include <stdexcept>

#include "swiftband/error.hpp"

namespace swiftband {

std::string_view to_string(Direction direction) {
  return direction == Direction::minimize ? "minimize" : "maximize";
}

Direction direction_from_string(std::string_view text) {
  if (text == "minimize") return Direction::minimize;
  if (text == "maximize") return Direction::maximize;
  throw ConfigError("direction must be 'minimize' or 'maximize', got '" + std::string(text) + "'");
}

std::weak_ordering compare_metric(double a, double b, Direction direction) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("compare_metric: non-finite metric value");
  if (a == b) return std::weak_ordering::equivalent;
  const bool a_better = direction == Direction::minimize ? a < b : a > b;
  return a_better ? std::weak_ordering::less : std::weak_ordering::greater;
}

std::string_view to_string(TrialStatus status) {
  switch (status) {
    case TrialStatus::pending: return "pending";
    case TrialStatus::running: return "running";
    case TrialStatus::paused: return "paused";
    case TrialStatus::terminated_by_predictor: return "terminated_by_predictor";
    case TrialStatus::eliminated_by_round: return "eliminated_by_round";
    case TrialStatus::completed: return "completed";
  }
  return "?";
}

bool is_terminal(TrialStatus status) {
  return status == TrialStatus::terminated_by_predictor || status == TrialStatus::eliminated_by_round ||
         status == TrialStatus::completed;
}

Trial::Trial(TrialId id, HyperparameterConfig config, std::string metric_name, Direction direction,
             std::optional<std::size_t> dataset_row)
    : id_(id), config_(std::move(config)), curve_{std::move(metric_name), direction, {}}, dataset_row_(dataset_row) {}

void Trial::set_status(TrialStatus next) {
  bool ok = false;
  switch (status_) {
    case TrialStatus::pending:
    case TrialStatus::paused:
      ok = next == TrialStatus::running;
      break;
    case TrialStatus::running:
      ok = next == TrialStatus::running || next == TrialStatus::paused || is_terminal(next);
      break;
    default:
      break;
  }
  if (!ok)
    throw std::logic_error("trial " + std::to_string(id_) + ": illegal transition " + std::string(to_string(status_)) +
                           " -> " + std::string(to_string(next)));
  status_ = next;
}

void Trial::extend(std::span<const double> segment) {
  if (status_ != TrialStatus::running)
    throw std::logic_error("trial " + std::to_string(id_) + ": cannot extend curve while " +
                           std::string(to_string(status_)));
  for (double v : segment) {
    if (!std::isfinite(v)) throw RunnerError(id_, "non-finite metric value in curve segment");
  }
  curve_.values.insert(curve_.values.end(), segment.begin(), segment.end());
}

TrialId best_trial(std::span<const Trial> trials, Direction direction) {
  const Trial* best = nullptr;
  for (const auto& trial : trials) {
    if (trial.curve().values.empty()) continue;
    if (best == nullptr) {
      best = &trial;
      continue;
    }
    auto order = compare_metric(trial.curve().last(), best->curve().last(), direction);
    if (order < 0 || (order == 0 && trial.id() < best->id())) best = &trial;
  }
  if (best == nullptr) throw std::invalid_argument("best_trial: no trial has an observed curve");
  return best->id();
}

}  // namespace swiftband
