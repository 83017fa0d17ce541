#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace swiftband {

enum class DimKind { continuous, log_continuous, integer, categorical };

std::string_view to_string(DimKind kind);
DimKind dim_kind_from_string(std::string_view text);

/// One hyperparameter axis. Numeric kinds use [low, high]; categorical uses
/// `categories`.
struct HpDim {
  std::string name;
  DimKind kind = DimKind::continuous;
  double low = 0.0;
  double high = 1.0;
  std::vector<std::string> categories;

  bool operator==(const HpDim&) const = default;
};

/// Numeric dims hold a double (integers are integral doubles); categorical
/// dims hold the category label.
using HpValue = std::variant<double, std::string>;

struct HyperparameterConfig {
  std::vector<HpValue> values;

  std::size_t size() const { return values.size(); }
  bool operator==(const HyperparameterConfig&) const = default;
};

std::string format_value(const HpValue& value);

class SearchSpace {
 public:
  SearchSpace() = default;
  /// Throws ConfigError when a dim is malformed or names repeat.
  explicit SearchSpace(std::vector<HpDim> dims);

  const std::vector<HpDim>& dims() const { return dims_; }
  std::size_t size() const { return dims_.size(); }

  /// Throws DataError describing the first offending value.
  void validate(const HyperparameterConfig& config) const;
  bool contains(const HyperparameterConfig& config) const;

  /// Maps a value of dim `index` to [0,1]: min-max for linear dims, in log
  /// space for log dims, category index / (count - 1) for categoricals.
  double normalize(std::size_t index, const HpValue& value) const;
  std::vector<double> normalize(const HyperparameterConfig& config) const;

  /// Parses a CSV cell for dim `index`.
  HpValue parse_value(std::size_t index, std::string_view text) const;

  bool operator==(const SearchSpace&) const = default;

  /// The unit hypercube named h_1..h_d, used by synthetic data.
  static SearchSpace unit_cube(std::size_t dims);

 private:
  std::vector<HpDim> dims_;
};

/// Uniform draw over the space; log dims are uniform in log space.
HyperparameterConfig sample_config(const SearchSpace& space, std::mt19937_64& rng);

void to_json(nlohmann::json& j, const HpDim& dim);
void from_json(const nlohmann::json& j, HpDim& dim);
void to_json(nlohmann::json& j, const HpValue& value);
void from_json(const nlohmann::json& j, HpValue& value);
nlohmann::json config_to_json(const HyperparameterConfig& config);
HyperparameterConfig config_from_json(const nlohmann::json& j);

}  // namespace swiftband
