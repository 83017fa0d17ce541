#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "swiftband/anneal.hpp"
#include "swiftband/svr.hpp"

namespace swiftband {

struct QsvrParams {
  int bits = 3;                 ///< K, bits per dual coefficient
  std::size_t sample_cap = 20;  ///< largest training set the QUBO may encode
  /// Box constraint of the binary encoding. The grid step is C / (2^K - 1),
  /// so C must stay near the scale of the optimal |beta| (O(1) for
  /// standardized targets) or the minimizer collapses to all-zeros.
  double C = 1.0;
  /// Equality-constraint penalty; defaults to 5 * max|y| * C (standardized y).
  std::optional<double> penalty;
  AnnealSchedule schedule;
};

/// alpha = scale * sum_k 2^k bit_k + offset, so all-ones bits give exactly C.
struct CoefficientEncoding {
  int bits = 3;
  double scale = 0.0;  ///< C / (2^bits - 1)
  double offset = 0.0;
};

/// Binary form of the penalized, negated SVR dual. Bits for alpha_i occupy
/// [i*K, (i+1)*K) and bits for alpha*_i occupy [(n+i)*K, (n+i+1)*K), lowest
/// significance first.
struct QuboProblem {
  QuboMatrix matrix;
  CoefficientEncoding encoding;
  double C = 0.0;
  double epsilon = 0.0;
  double penalty = 0.0;
  std::vector<double> kernel;   ///< n x n
  std::vector<double> targets;  ///< standardized
  StandardizedData data;        ///< empty when built from a raw kernel

  std::size_t samples() const { return targets.size(); }
};

/// Builds the QUBO for a fixed kernel matrix and targets.
QuboProblem build_svr_qubo(std::span<const double> kernel, std::span<const double> y, double C, double epsilon,
                           int bits, double penalty);

/// Standardizes (X, y) like train_svr and encodes the dual with box
/// `qsvr.C`; epsilon and gamma come from `svr`. Throws
/// std::invalid_argument when n exceeds `qsvr.sample_cap` or bits < 1.
QuboProblem svr_to_qubo(const std::vector<FeatureVector>& X, std::span<const double> y, const SvrParams& svr,
                        const QsvrParams& qsvr);

struct DecodedCoefficients {
  std::vector<double> alpha;
  std::vector<double> alpha_star;
};

DecodedCoefficients decode_coefficients(const QuboProblem& problem, std::span<const std::uint8_t> bits);

/// 1/2 b'Kb + eps*sum(a + a*) - y'b + penalty * (sum b)^2 with b = a - a*.
double penalized_negated_dual(std::span<const double> kernel, std::span<const double> y,
                              const DecodedCoefficients& coefficients, double epsilon, double penalty);

/// Model from an annealed bit vector. The bias averages the KKT estimate
/// over coefficients strictly inside (0, C); without any, it is the median
/// training residual.
SvrModel decode_qsvr(const QuboProblem& problem, std::span<const std::uint8_t> bits);

/// svr_to_qubo + simulated_anneal + decode_qsvr.
SvrModel train_qsvr(const std::vector<FeatureVector>& X, std::span<const double> y, const SvrParams& svr,
                    const QsvrParams& qsvr, std::mt19937_64& rng);

}  // namespace swiftband
