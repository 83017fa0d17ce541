#include "swiftband/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "swiftband/error.hpp"

namespace swiftband {

namespace {

std::filesystem::path strip_suffix(const std::filesystem::path& path) {
  const std::string text = path.string();
  for (const std::string suffix : {".curves.csv", ".meta.json"}) {
    if (text.size() > suffix.size() && text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0)
      return text.substr(0, text.size() - suffix.size());
  }
  return path;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

std::string shortest(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

std::filesystem::path curves_path(const std::filesystem::path& prefix) {
  return strip_suffix(prefix).string() + ".curves.csv";
}

std::filesystem::path meta_path(const std::filesystem::path& prefix) {
  return strip_suffix(prefix).string() + ".meta.json";
}

LearningCurveDataset::LearningCurveDataset(DatasetMeta meta, SearchSpace space, std::vector<DatasetRow> rows)
    : meta_(std::move(meta)), space_(std::move(space)), rows_(std::move(rows)) {
  if (meta_.target_epoch < 1) throw DataError("target_epoch must be >= 1");
  if (meta_.hp_dim != static_cast<int>(space_.size()))
    throw DataError("hp_dim " + std::to_string(meta_.hp_dim) + " does not match " + std::to_string(space_.size()) +
                    " search-space dims");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& row = rows_[i];
    const std::string where = "row " + std::to_string(i + 1) + ": ";
    if (static_cast<int>(row.curve.size()) != meta_.target_epoch)
      throw DataError(where + "curve has " + std::to_string(row.curve.size()) + " values, expected " +
                      std::to_string(meta_.target_epoch));
    for (double v : row.curve)
      if (!std::isfinite(v)) throw DataError(where + "non-finite curve value");
    try {
      space_.validate(row.config);
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
  }
}

LearningCurveDataset load_dataset(const std::filesystem::path& path) {
  const auto prefix = strip_suffix(path);
  std::ifstream meta_in(meta_path(prefix));
  if (!meta_in) throw DataError("cannot open " + meta_path(prefix).string());
  DatasetMeta meta;
  std::vector<HpDim> dims;
  try {
    auto j = nlohmann::json::parse(meta_in);
    meta.metric_name = j.at("metric_name").get<std::string>();
    meta.direction = direction_from_string(j.at("direction").get<std::string>());
    meta.hp_dim = j.at("hp_dim").get<int>();
    meta.target_epoch = j.at("target_epoch").get<int>();
    dims = j.at("space").get<std::vector<HpDim>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed " + meta_path(prefix).string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw DataError("malformed " + meta_path(prefix).string() + ": " + e.what());
  }
  SearchSpace space;
  try {
    space = SearchSpace(std::move(dims));
  } catch (const ConfigError& e) {
    throw DataError(std::string("invalid search space: ") + e.what());
  }
  if (meta.hp_dim != static_cast<int>(space.size()))
    throw DataError("hp_dim " + std::to_string(meta.hp_dim) + " does not match " + std::to_string(space.size()) +
                    " search-space dims");

  std::ifstream csv(curves_path(prefix));
  if (!csv) throw DataError("cannot open " + curves_path(prefix).string());
  std::string line;
  if (!std::getline(csv, line)) throw DataError("missing header in " + curves_path(prefix).string());
  const auto header = split(trim(line), ',');
  const std::size_t d = space.size();
  const std::size_t width = d + static_cast<std::size_t>(meta.target_epoch);
  if (header.size() != width)
    throw DataError("malformed header: " + std::to_string(header.size()) + " columns, expected " +
                    std::to_string(width) + " (hp_dim + target_epoch)");
  for (std::size_t c = 0; c < width; ++c) {
    const std::string expected = c < d ? "h_" + std::to_string(c + 1) : "e_" + std::to_string(c - d + 1);
    const auto name = trim(header[c]);
    if (name != expected && !(c < d && name == space.dims()[c].name))
      throw DataError("malformed header: column " + std::to_string(c + 1) + " is '" + std::string(name) +
                      "', expected '" + expected + "'");
  }

  std::vector<DatasetRow> rows;
  std::size_t row_no = 0;
  while (std::getline(csv, line)) {
    auto text = trim(line);
    if (text.empty()) continue;
    ++row_no;
    const std::string where = "row " + std::to_string(row_no) + ": ";
    const auto cells = split(text, ',');
    if (cells.size() < d)
      throw DataError(where + "only " + std::to_string(cells.size()) + " columns");
    DatasetRow row;
    try {
      for (std::size_t c = 0; c < d; ++c) row.config.values.push_back(space.parse_value(c, trim(cells[c])));
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
    for (std::size_t c = d; c < cells.size(); ++c) {
      auto cell = trim(cells[c]);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw DataError(where + "cannot parse curve value '" + std::string(cell) + "'");
      row.curve.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return LearningCurveDataset(std::move(meta), std::move(space), std::move(rows));
}

void save_dataset(const LearningCurveDataset& dataset, const std::filesystem::path& prefix) {
  const auto base = strip_suffix(prefix);
  if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());

  nlohmann::json meta{{"metric_name", dataset.meta().metric_name},
                      {"direction", std::string(to_string(dataset.meta().direction))},
                      {"hp_dim", dataset.meta().hp_dim},
                      {"target_epoch", dataset.meta().target_epoch},
                      {"space", dataset.space().dims()}};
  std::ofstream meta_out(meta_path(base));
  if (!meta_out) throw DataError("cannot write " + meta_path(base).string());
  meta_out << meta.dump(2) << '\n';

  std::ofstream csv(curves_path(base));
  if (!csv) throw DataError("cannot write " + curves_path(base).string());
  const std::size_t d = dataset.space().size();
  std::string sep;
  for (std::size_t c = 0; c < d; ++c, sep = ",") csv << sep << "h_" << c + 1;
  for (int e = 1; e <= dataset.meta().target_epoch; ++e, sep = ",") csv << sep << "e_" << e;
  csv << '\n';
  for (const auto& row : dataset.rows()) {
    sep.clear();
    for (const auto& v : row.config.values) {
      csv << sep << format_value(v);
      sep = ",";
    }
    for (double v : row.curve) {
      csv << sep << shortest(v);
      sep = ",";
    }
    csv << '\n';
  }
  if (!csv) throw DataError("failed writing " + curves_path(base).string());
}

RowDrawer::RowDrawer(const LearningCurveDataset& dataset, std::uint64_t seed, bool without_replacement)
    : dataset_(&dataset), rng_(seed), without_replacement_(without_replacement) {
  if (without_replacement_) {
    pool_.resize(dataset.size());
    for (std::size_t i = 0; i < pool_.size(); ++i) pool_[i] = i;
  }
}

std::size_t RowDrawer::draw() {
  if (!without_replacement_) {
    if (dataset_->size() == 0) throw DataError("cannot draw from an empty dataset");
    std::uniform_int_distribution<std::size_t> pick(0, dataset_->size() - 1);
    return pick(rng_);
  }
  if (pool_.empty())
    throw DataError("dataset exhausted after " + std::to_string(dataset_->size()) + " draws without replacement");
  std::uniform_int_distribution<std::size_t> pick(0, pool_.size() - 1);
  const std::size_t slot = pick(rng_);
  const std::size_t row = pool_[slot];
  pool_[slot] = pool_.back();
  pool_.pop_back();
  return row;
}

std::size_t RowDrawer::remaining() const {
  return without_replacement_ ? pool_.size() : dataset_->size();
}

}  // namespace swiftband
