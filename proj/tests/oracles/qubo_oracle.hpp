#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace swiftband::oracle {

struct QuboMinimum {
  std::vector<std::uint8_t> bits;
  double energy = std::numeric_limits<double>::infinity();
};

/// x'Qx + offset summed term by term over a row-major n x n matrix.
inline double qubo_energy(const std::vector<double>& Q, std::size_t n, double offset,
                          const std::vector<std::uint8_t>& x) {
  double e = offset;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (x[i] && x[j]) e += Q[i * n + j];
  return e;
}

/// Enumerates all 2^n assignments. Meant for n <= 20.
inline QuboMinimum exhaustive_minimum(const std::vector<double>& Q, std::size_t n, double offset) {
  if (n > 20) throw std::invalid_argument("oracle: too many variables to enumerate");
  QuboMinimum best;
  std::vector<std::uint8_t> x(n, 0);
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>((code >> i) & 1U);
    const double e = qubo_energy(Q, n, offset, x);
    if (e < best.energy) {
      best.energy = e;
      best.bits = x;
    }
  }
  return best;
}

}  // namespace swiftband::oracle
