#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "swiftband/features.hpp"

namespace swiftband {

struct SvrParams {
  double C = 10.0;
  /// Tube half-width in standardized target units.
  double epsilon = 1e-3;
  /// RBF width; defaults to 1 / feature_count.
  std::optional<double> gamma;
  double tolerance = 1e-3;
  long max_iterations = 100000;
};

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

/// Row-major n x n Gram matrix.
std::vector<double> kernel_matrix(const std::vector<FeatureVector>& inputs, double gamma);

/// Solution of the epsilon-SVR dual on a fixed kernel matrix.
struct DualSolution {
  std::vector<double> beta;  ///< alpha_i - alpha*_i
  double bias = 0.0;
  double objective = 0.0;  ///< dual objective (maximization form)
  long iterations = 0;
  bool hit_iteration_cap = false;
};

/// -1/2 b'Kb - eps*sum|b| + y'b. Equals the dual objective whenever
/// alpha_i * alpha*_i = 0, which holds at every optimum.
double svr_dual_objective(std::span<const double> kernel, std::span<const double> y, std::span<const double> beta,
                          double epsilon);

/// Pairwise working-set (second-order selection) solver for
///   max -1/2 sum (a_i - a*_i)(a_j - a*_j) K_ij - eps sum (a_i + a*_i) + sum y_i (a_i - a*_i)
///   s.t. 0 <= a, a* <= C, sum (a_i - a*_i) = 0.
/// Stops once the maximal KKT violation drops below `tolerance`; hitting
/// `max_iterations` returns the current feasible iterate with the cap flag set.
DualSolution solve_svr_dual(std::span<const double> kernel, std::span<const double> y, double C, double epsilon,
                            double tolerance, long max_iterations);

/// Training inputs and targets after standardization.
struct StandardizedData {
  std::vector<FeatureVector> inputs;
  std::vector<double> targets;
  std::vector<double> feature_mean;
  std::vector<double> feature_scale;  ///< 1 for constant features
  double target_mean = 0.0;
  double target_scale = 1.0;  ///< 1 for constant targets
  double gamma = 1.0;
  std::vector<double> kernel;
};

/// Throws std::invalid_argument for fewer than 2 samples, ragged inputs or
/// non-finite values.
StandardizedData standardize(const std::vector<FeatureVector>& X, std::span<const double> y,
                             std::optional<double> gamma);

struct SvrModel {
  std::vector<FeatureVector> inputs;  ///< standardized training inputs
  std::vector<double> beta;
  double bias = 0.0;
  double gamma = 1.0;
  double C = 10.0;
  double epsilon = 1e-3;
  std::vector<double> feature_mean;
  std::vector<double> feature_scale;
  double target_mean = 0.0;
  double target_scale = 1.0;
  bool hit_iteration_cap = false;

  std::size_t feature_count() const { return feature_mean.size(); }

  /// Throws std::invalid_argument on a feature-length mismatch.
  double predict(std::span<const double> x) const;
};

SvrModel train_svr(const std::vector<FeatureVector>& X, std::span<const double> y, const SvrParams& params = {});

inline double predict(const SvrModel& model, std::span<const double> x) { return model.predict(x); }

/// Standard deviation of the n held-out residuals y_i - f_{-i}(x_i).
/// Throws std::invalid_argument for n < 3.
double loocv_std(const std::vector<FeatureVector>& X, std::span<const double> y, const SvrParams& params = {});

void to_json(nlohmann::json& j, const SvrModel& model);
void from_json(const nlohmann::json& j, SvrModel& model);

}  // namespace swiftband
