#pragma once

#include <random>
#include <span>
#include <vector>

#include "swiftband/dataset.hpp"

namespace swiftband {

/// Coefficients of the hyperparameter -> power-law map. With h normalized to
/// [0,1]^d:
///   c   = c_base + c_slope * h_1
///   y_inf = yinf_base + yinf_slope * h_2 + yinf_rest * mean(h_3..h_d)
///   y_0 = y0
/// Missing dims contribute 0.5.
struct CurveFamily {
  double c_base = 0.3;
  double c_slope = 1.2;
  double yinf_base = 0.05;
  double yinf_slope = 0.4;
  double yinf_rest = 0.05;
  double y0 = 1.0;
};

struct SyntheticSpec {
  int rows = 200;
  int target_epoch = 81;
  int hp_dim = 3;
  double noise_sigma = 0.01;
  CurveFamily family;

  /// Throws ConfigError when out of range.
  void validate() const;
};

struct PowerLaw {
  double y0 = 1.0;
  double y_inf = 0.0;
  double rate = 1.0;

  /// y(t) = y_inf + (y0 - y_inf) * t^(-rate), t >= 1.
  double at(int epoch) const;
};

PowerLaw curve_shape(std::span<const double> normalized_hps, const CurveFamily& family);

/// Noiseless curve of `epochs` values.
std::vector<double> power_law_curve(const PowerLaw& shape, int epochs);

/// Draws configs uniformly from the unit cube, evaluates their power-law
/// curves and adds N(0, noise_sigma) per epoch. Minimize direction.
LearningCurveDataset generate_synthetic(const SyntheticSpec& spec, std::mt19937_64& rng);

}  // namespace swiftband
