#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace swiftband {

using BitVector = std::vector<std::uint8_t>;

/// Dense symmetric QUBO matrix; energy(x) = x'Qx + offset.
struct QuboMatrix {
  std::size_t size = 0;
  std::vector<double> values;  ///< row-major size x size
  double offset = 0.0;

  QuboMatrix() = default;
  explicit QuboMatrix(std::size_t n) : size(n), values(n * n, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return values[i * size + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * size + j]; }

  double energy(std::span<const std::uint8_t> bits) const;
  bool is_symmetric(double tolerance = 0.0) const;
};

struct AnnealSchedule {
  int sweeps = 1000;
  /// Non-positive temperatures are derived from the matrix: the hot end
  /// accepts the largest single-flip uphill move with probability 1/2, the
  /// cold end the smallest with probability 1/100.
  double t_start = 0.0;
  double t_end = 0.0;
  int restarts = 10;
};

struct AnnealResult {
  BitVector bits;
  double energy = 0.0;
};

/// Single-bit-flip Metropolis annealing with a geometric temperature ramp.
/// Returns the lowest-energy vector visited across all restarts (never worse
/// than all-zeros). Deterministic for a given rng state.
AnnealResult simulated_anneal(const QuboMatrix& q, const AnnealSchedule& schedule, std::mt19937_64& rng);

}  // namespace swiftband
