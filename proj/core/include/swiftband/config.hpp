#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "swiftband/scheduler.hpp"
#include "swiftband/synthetic.hpp"

namespace swiftband {

enum class Algorithm { hyperband, fast, swift_svr, swift_qsvr, threshold_search };

std::string_view to_string(Algorithm algorithm);
/// Throws ConfigError.
Algorithm algorithm_from_string(std::string_view text);
const std::vector<Algorithm>& all_algorithms();

/// Applies the keys present in `block` onto `cfg`; unknown keys and
/// ill-typed values throw ConfigError. Does not validate ranges.
void apply_scheduler_json(const nlohmann::json& block, SchedulerConfig& cfg);
nlohmann::json scheduler_config_to_json(const SchedulerConfig& cfg);

struct DatasetSpec {
  std::optional<std::filesystem::path> path;
  std::optional<SyntheticSpec> synthetic;
  std::uint64_t seed = 1;  ///< synthetic generation seed
};

/// Search space for runs without a dataset (distributed config workers).
struct SpaceSpec {
  std::vector<HpDim> dims;
  std::string metric_name = "loss";
  Direction direction = Direction::minimize;
};

struct ExperimentConfig {
  std::optional<DatasetSpec> dataset;
  std::optional<SpaceSpec> space;
  std::vector<Algorithm> algorithms = all_algorithms();
  int runs = 10;
  std::uint64_t base_seed = 0;
  /// Shared scheduler block, then per-algorithm patches on top of it.
  nlohmann::json scheduler = nlohmann::json::object();
  std::map<Algorithm, nlohmann::json> overrides;
  std::filesystem::path output_dir = "out";
  bool record_wall_time = true;

  /// Throws ConfigError; checks every algorithm's resolved scheduler config.
  void validate() const;

  /// Resolved config for `algorithm` at run seed `seed`. R defaults to
  /// `default_max_epochs` when the blocks leave it unset.
  SchedulerConfig scheduler_for(Algorithm algorithm, int default_max_epochs, std::uint64_t seed) const;
};

/// Throws ConfigError on unknown keys or bad values.
ExperimentConfig experiment_config_from_json(const nlohmann::json& body);
nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace swiftband
