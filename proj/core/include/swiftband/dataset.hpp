#pragma once

#include <cstddef>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "swiftband/space.hpp"
#include "swiftband/trial.hpp"

namespace swiftband {

struct DatasetMeta {
  std::string metric_name = "loss";
  Direction direction = Direction::minimize;
  int hp_dim = 0;
  int target_epoch = 0;

  bool operator==(const DatasetMeta&) const = default;
};

struct DatasetRow {
  HyperparameterConfig config;
  std::vector<double> curve;  ///< exactly target_epoch values

  bool operator==(const DatasetRow&) const = default;
};

/// Pre-recorded learning curves, one row per configuration. Immutable once
/// built; the constructor enforces every row invariant.
class LearningCurveDataset {
 public:
  LearningCurveDataset(DatasetMeta meta, SearchSpace space, std::vector<DatasetRow> rows);

  const DatasetMeta& meta() const { return meta_; }
  const SearchSpace& space() const { return space_; }
  const std::vector<DatasetRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  const DatasetRow& row(std::size_t index) const { return rows_.at(index); }

  bool operator==(const LearningCurveDataset&) const = default;

 private:
  DatasetMeta meta_;
  SearchSpace space_;
  std::vector<DatasetRow> rows_;
};

/// `path` may be the `<name>` prefix or either of `<name>.curves.csv` /
/// `<name>.meta.json`. Errors name the offending data row (1-based).
LearningCurveDataset load_dataset(const std::filesystem::path& path);

/// Writes `<prefix>.curves.csv` and `<prefix>.meta.json`. Values are written
/// in shortest round-trip form so a reload is bit-exact.
void save_dataset(const LearningCurveDataset& dataset, const std::filesystem::path& prefix);

std::filesystem::path curves_path(const std::filesystem::path& prefix);
std::filesystem::path meta_path(const std::filesystem::path& prefix);

/// Uniform row sampler over a dataset, optionally without replacement.
class RowDrawer {
 public:
  RowDrawer(const LearningCurveDataset& dataset, std::uint64_t seed, bool without_replacement);

  /// Index of the drawn row. Throws DataError once a without-replacement
  /// drawer is exhausted.
  std::size_t draw();
  std::size_t remaining() const;

 private:
  const LearningCurveDataset* dataset_;
  std::mt19937_64 rng_;
  bool without_replacement_;
  std::vector<std::size_t> pool_;
};

}  // namespace swiftband
