#include "swiftband/space.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "swiftband/error.hpp"

namespace swiftband {

std::string_view to_string(DimKind kind) {
  switch (kind) {
    case DimKind::continuous: return "continuous";
    case DimKind::log_continuous: return "log_continuous";
    case DimKind::integer: return "integer";
    case DimKind::categorical: return "categorical";
  }
  return "?";
}

DimKind dim_kind_from_string(std::string_view text) {
  if (text == "continuous") return DimKind::continuous;
  if (text == "log_continuous") return DimKind::log_continuous;
  if (text == "integer") return DimKind::integer;
  if (text == "categorical") return DimKind::categorical;
  throw ConfigError("unknown dimension kind '" + std::string(text) + "'");
}

std::string format_value(const HpValue& value) {
  if (const auto* label = std::get_if<std::string>(&value)) return *label;
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, std::get<double>(value));
  return std::string(buf, end);
}

SearchSpace::SearchSpace(std::vector<HpDim> dims) : dims_(std::move(dims)) {
  std::set<std::string> names;
  for (auto& dim : dims_) {
    if (dim.name.empty()) throw ConfigError("dimension with empty name");
    if (!names.insert(dim.name).second) throw ConfigError("duplicate dimension name '" + dim.name + "'");
    switch (dim.kind) {
      case DimKind::continuous:
      case DimKind::log_continuous:
        if (!std::isfinite(dim.low) || !std::isfinite(dim.high) || !(dim.low < dim.high))
          throw ConfigError("dimension '" + dim.name + "' needs low < high");
        if (dim.kind == DimKind::log_continuous && dim.low <= 0.0)
          throw ConfigError("log dimension '" + dim.name + "' needs positive bounds");
        break;
      case DimKind::integer:
        if (dim.low != std::floor(dim.low) || dim.high != std::floor(dim.high) || dim.low > dim.high)
          throw ConfigError("integer dimension '" + dim.name + "' needs integral low <= high");
        break;
      case DimKind::categorical:
        if (dim.categories.empty()) throw ConfigError("categorical dimension '" + dim.name + "' has no categories");
        // Bounds are unused for categoricals; pin them so equal spaces compare equal.
        dim.low = 0.0;
        dim.high = static_cast<double>(dim.categories.size() - 1);
        break;
    }
  }
}

SearchSpace SearchSpace::unit_cube(std::size_t dims) {
  std::vector<HpDim> out;
  out.reserve(dims);
  for (std::size_t i = 0; i < dims; ++i) out.push_back({"h_" + std::to_string(i + 1), DimKind::continuous, 0.0, 1.0, {}});
  return SearchSpace(std::move(out));
}

void SearchSpace::validate(const HyperparameterConfig& config) const {
  if (config.size() != dims_.size())
    throw DataError("config has " + std::to_string(config.size()) + " values, space has " +
                    std::to_string(dims_.size()) + " dims");
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const auto& dim = dims_[i];
    const auto& value = config.values[i];
    if (dim.kind == DimKind::categorical) {
      const auto* label = std::get_if<std::string>(&value);
      if (label == nullptr || std::find(dim.categories.begin(), dim.categories.end(), *label) == dim.categories.end())
        throw DataError("value '" + format_value(value) + "' is not a category of '" + dim.name + "'");
      continue;
    }
    const auto* number = std::get_if<double>(&value);
    if (number == nullptr || !std::isfinite(*number))
      throw DataError("dimension '" + dim.name + "' expects a finite number, got '" + format_value(value) + "'");
    if (*number < dim.low || *number > dim.high)
      throw DataError("value " + format_value(value) + " outside [" + format_value(dim.low) + ", " +
                      format_value(dim.high) + "] for '" + dim.name + "'");
    if (dim.kind == DimKind::integer && *number != std::floor(*number))
      throw DataError("dimension '" + dim.name + "' expects an integer, got " + format_value(value));
  }
}

bool SearchSpace::contains(const HyperparameterConfig& config) const {
  try {
    validate(config);
    return true;
  } catch (const DataError&) {
    return false;
  }
}

double SearchSpace::normalize(std::size_t index, const HpValue& value) const {
  const auto& dim = dims_.at(index);
  switch (dim.kind) {
    case DimKind::continuous:
      return (std::get<double>(value) - dim.low) / (dim.high - dim.low);
    case DimKind::log_continuous:
      return (std::log(std::get<double>(value)) - std::log(dim.low)) / (std::log(dim.high) - std::log(dim.low));
    case DimKind::integer:
      if (dim.high == dim.low) return 0.0;
      return (std::get<double>(value) - dim.low) / (dim.high - dim.low);
    case DimKind::categorical: {
      if (dim.categories.size() == 1) return 0.0;
      auto it = std::find(dim.categories.begin(), dim.categories.end(), std::get<std::string>(value));
      return static_cast<double>(it - dim.categories.begin()) / static_cast<double>(dim.categories.size() - 1);
    }
  }
  return 0.0;
}

std::vector<double> SearchSpace::normalize(const HyperparameterConfig& config) const {
  std::vector<double> out(config.size());
  for (std::size_t i = 0; i < config.size(); ++i) out[i] = normalize(i, config.values[i]);
  return out;
}

HpValue SearchSpace::parse_value(std::size_t index, std::string_view text) const {
  const auto& dim = dims_.at(index);
  if (dim.kind == DimKind::categorical) return std::string(text);
  double number = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), number);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw DataError("cannot parse '" + std::string(text) + "' as a number for '" + dim.name + "'");
  return number;
}

HyperparameterConfig sample_config(const SearchSpace& space, std::mt19937_64& rng) {
  HyperparameterConfig config;
  config.values.reserve(space.size());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& dim : space.dims()) {
    switch (dim.kind) {
      case DimKind::continuous:
        config.values.emplace_back(dim.low + (dim.high - dim.low) * unit(rng));
        break;
      case DimKind::log_continuous: {
        const double lo = std::log(dim.low), hi = std::log(dim.high);
        // exp(log(x)) may drift one ulp past a bound
        config.values.emplace_back(std::clamp(std::exp(lo + (hi - lo) * unit(rng)), dim.low, dim.high));
        break;
      }
      case DimKind::integer: {
        std::uniform_int_distribution<long long> pick(static_cast<long long>(dim.low), static_cast<long long>(dim.high));
        config.values.emplace_back(static_cast<double>(pick(rng)));
        break;
      }
      case DimKind::categorical: {
        std::uniform_int_distribution<std::size_t> pick(0, dim.categories.size() - 1);
        config.values.emplace_back(dim.categories[pick(rng)]);
        break;
      }
    }
  }
  return config;
}

void to_json(nlohmann::json& j, const HpDim& dim) {
  j = nlohmann::json{{"name", dim.name}, {"kind", std::string(to_string(dim.kind))}};
  if (dim.kind == DimKind::categorical) {
    j["categories"] = dim.categories;
  } else {
    j["low"] = dim.low;
    j["high"] = dim.high;
  }
}

void from_json(const nlohmann::json& j, HpDim& dim) {
  dim.name = j.at("name").get<std::string>();
  dim.kind = dim_kind_from_string(j.at("kind").get<std::string>());
  if (dim.kind == DimKind::categorical) {
    dim.categories = j.at("categories").get<std::vector<std::string>>();
  } else {
    dim.low = j.at("low").get<double>();
    dim.high = j.at("high").get<double>();
  }
}

void to_json(nlohmann::json& j, const HpValue& value) {
  if (const auto* label = std::get_if<std::string>(&value)) {
    j = *label;
  } else {
    j = std::get<double>(value);
  }
}

void from_json(const nlohmann::json& j, HpValue& value) {
  if (j.is_string()) {
    value = j.get<std::string>();
  } else if (j.is_number()) {
    value = j.get<double>();
  } else {
    throw DataError("hyperparameter value must be a number or a string");
  }
}

nlohmann::json config_to_json(const HyperparameterConfig& config) {
  auto out = nlohmann::json::array();
  for (const auto& v : config.values) {
    nlohmann::json item;
    to_json(item, v);
    out.push_back(std::move(item));
  }
  return out;
}

HyperparameterConfig config_from_json(const nlohmann::json& j) {
  HyperparameterConfig config;
  for (const auto& v : j) {
    HpValue value;
    from_json(v, value);
    config.values.push_back(std::move(value));
  }
  return config;
}

}  // namespace swiftband
