#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swiftband/trial.hpp"

namespace swiftband {

struct RunRecord {
  std::string algorithm;
  int run = 0;
  std::uint64_t seed = 0;
  TrialId best_trial = -1;
  double best_metric = 0.0;
  long epochs = 0;
  double wall_time_ms = 0.0;
  std::size_t predictor_terminations = 0;

  bool operator==(const RunRecord&) const = default;
};

/// Order statistics of one algorithm's runs. "best" and "worst" follow the
/// metric direction.
struct AlgorithmSummary {
  std::string algorithm;
  int runs = 0;
  double mean_best_metric = 0.0;
  double best_best_metric = 0.0;
  double worst_best_metric = 0.0;
  double mean_epochs = 0.0;
  long min_epochs = 0;
  long max_epochs = 0;

  bool operator==(const AlgorithmSummary&) const = default;
};

struct ExperimentReport {
  std::string metric_name = "loss";
  Direction direction = Direction::minimize;
  std::vector<RunRecord> runs;  ///< grouped by algorithm, then run index
  std::vector<AlgorithmSummary> summaries;

  bool operator==(const ExperimentReport&) const = default;
};

/// Recomputes one summary from the matching run rows (in row order).
AlgorithmSummary summarize(const std::vector<RunRecord>& runs, const std::string& algorithm, Direction direction);
/// Fills `summaries` from `runs`, one per algorithm in first-seen order.
void summarize_all(ExperimentReport& report);

nlohmann::json report_to_json(const ExperimentReport& report);
/// Throws DataError.
ExperimentReport report_from_json(const nlohmann::json& body);

std::string report_to_csv(const ExperimentReport& report);
/// Throws DataError.
ExperimentReport report_from_csv(const std::string& text);

std::string plot_data_csv(const ExperimentReport& report);

/// `format` is "csv" or "json". Throws Error when the file cannot be written.
void emit_report(const ExperimentReport& report, const std::string& format, const std::filesystem::path& path);
void emit_plot_data(const ExperimentReport& report, const std::filesystem::path& path);
/// Picks the parser from the file extension.
ExperimentReport load_report(const std::filesystem::path& path);

}  // namespace swiftband
