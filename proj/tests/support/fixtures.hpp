#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "swiftband/dataset.hpp"
#include "swiftband/runner.hpp"
#include "swiftband/synthetic.hpp"

namespace swiftband::testing {

/// One-dimensional dataset with the given curves; row i has h_1 = i / n.
inline LearningCurveDataset make_dataset(const std::vector<std::vector<double>>& curves,
                                         Direction direction = Direction::minimize) {
  DatasetMeta meta{"loss", direction, 1, static_cast<int>(curves.front().size())};
  std::vector<DatasetRow> rows;
  for (std::size_t i = 0; i < curves.size(); ++i)
    rows.push_back({HyperparameterConfig{{static_cast<double>(i) / static_cast<double>(curves.size())}}, curves[i]});
  return LearningCurveDataset(meta, SearchSpace::unit_cube(1), std::move(rows));
}

inline LearningCurveDataset default_synthetic(std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  return generate_synthetic(SyntheticSpec{}, rng);
}

/// Hands out dataset rows in order: trial i gets row i.
class SequentialSource : public TrialSource {
 public:
  explicit SequentialSource(const LearningCurveDataset& dataset) : dataset_(&dataset) {}
  Trial next(TrialId id) override {
    const auto row = static_cast<std::size_t>(id);
    return Trial(id, dataset_->row(row).config, dataset_->meta().metric_name, dataset_->meta().direction, row);
  }

 private:
  const LearningCurveDataset* dataset_;
};

/// Unique directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("swiftband-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace swiftband::testing
