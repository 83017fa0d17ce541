#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "swiftband/qsvr.hpp"
#include "swiftband/svr.hpp"

namespace swiftband::testing {

/// Seeded SVR-derived QUBOs of at most 12 variables: 1-2 training points in
/// 1-D with 2-3 bits per coefficient, random targets and box.
inline std::vector<QuboProblem> random_svr_qubos(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  std::uniform_real_distribution<double> box(0.5, 2.0);
  std::uniform_real_distribution<double> tube(0.0, 0.2);
  std::normal_distribution<double> target(0.0, 1.0);
  std::vector<QuboProblem> out;
  for (int c = 0; c < count; ++c) {
    const std::size_t n = c % 4 == 0 ? 1 : 2;
    const int bits = c % 2 == 0 ? 3 : 2;
    std::vector<FeatureVector> X;
    std::vector<double> y;
    for (std::size_t i = 0; i < n; ++i) {
      X.push_back({coord(rng)});
      y.push_back(target(rng));
    }
    const auto K = kernel_matrix(X, 1.0);
    const double C = box(rng);
    double max_abs = 0.0;
    for (double v : y) max_abs = std::max(max_abs, std::abs(v));
    out.push_back(build_svr_qubo(K, y, C, tube(rng), bits, 5.0 * max_abs * C));
  }
  return out;
}

}  // namespace swiftband::testing
