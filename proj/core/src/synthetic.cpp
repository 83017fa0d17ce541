#include "swiftband/synthetic.hpp"

#include <cmath>

#include "swiftband/error.hpp"

namespace swiftband {

void SyntheticSpec::validate() const {
  if (rows < 1) throw ConfigError("synthetic rows must be >= 1");
  if (target_epoch < 2) throw ConfigError("synthetic target_epoch must be >= 2");
  if (hp_dim < 0) throw ConfigError("synthetic hp_dim must be >= 0");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw ConfigError("noise_sigma must be >= 0");
}

double PowerLaw::at(int epoch) const {
  return y_inf + (y0 - y_inf) * std::pow(static_cast<double>(epoch), -rate);
}

PowerLaw curve_shape(std::span<const double> h, const CurveFamily& family) {
  const double h1 = h.size() > 0 ? h[0] : 0.5;
  const double h2 = h.size() > 1 ? h[1] : 0.5;
  double rest = 0.5;
  if (h.size() > 2) {
    rest = 0.0;
    for (std::size_t i = 2; i < h.size(); ++i) rest += h[i];
    rest /= static_cast<double>(h.size() - 2);
  }
  PowerLaw shape;
  shape.y0 = family.y0;
  shape.rate = family.c_base + family.c_slope * h1;
  shape.y_inf = family.yinf_base + family.yinf_slope * h2 + family.yinf_rest * rest;
  return shape;
}

std::vector<double> power_law_curve(const PowerLaw& shape, int epochs) {
  std::vector<double> out(static_cast<std::size_t>(epochs));
  for (int e = 1; e <= epochs; ++e) out[static_cast<std::size_t>(e - 1)] = shape.at(e);
  return out;
}

LearningCurveDataset generate_synthetic(const SyntheticSpec& spec, std::mt19937_64& rng) {
  spec.validate();
  auto space = SearchSpace::unit_cube(static_cast<std::size_t>(spec.hp_dim));
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<DatasetRow> rows;
  rows.reserve(static_cast<std::size_t>(spec.rows));
  for (int r = 0; r < spec.rows; ++r) {
    DatasetRow row;
    row.config = sample_config(space, rng);
    const auto shape = curve_shape(space.normalize(row.config), spec.family);
    row.curve = power_law_curve(shape, spec.target_epoch);
    if (spec.noise_sigma > 0.0)
      for (auto& v : row.curve) v += spec.noise_sigma * noise(rng);
    rows.push_back(std::move(row));
  }
  DatasetMeta meta{"loss", Direction::minimize, spec.hp_dim, spec.target_epoch};
  return LearningCurveDataset(std::move(meta), std::move(space), std::move(rows));
}

}  // namespace swiftband
