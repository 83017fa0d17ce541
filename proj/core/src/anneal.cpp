#include "swiftband/anneal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace swiftband {

double QuboMatrix::energy(std::span<const std::uint8_t> bits) const {
  if (bits.size() != size) throw std::invalid_argument("QUBO energy: bit vector length mismatch");
  double e = offset;
  for (std::size_t i = 0; i < size; ++i) {
    if (!bits[i]) continue;
    for (std::size_t j = 0; j < size; ++j)
      if (bits[j]) e += values[i * size + j];
  }
  return e;
}

bool QuboMatrix::is_symmetric(double tolerance) const {
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = i + 1; j < size; ++j)
      if (std::abs(at(i, j) - at(j, i)) > tolerance) return false;
  return true;
}

namespace {

std::pair<double, double> default_temperatures(const QuboMatrix& q) {
  double max_delta = 0.0;
  double min_delta = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < q.size; ++i) {
    double reach = std::abs(q.at(i, i));
    for (std::size_t j = 0; j < q.size; ++j) {
      if (j == i) continue;
      const double c = 2.0 * std::abs(q.at(i, j));
      reach += c;
      if (c > 0.0) min_delta = std::min(min_delta, c);
    }
    if (q.at(i, i) != 0.0) min_delta = std::min(min_delta, std::abs(q.at(i, i)));
    max_delta = std::max(max_delta, reach);
  }
  if (max_delta == 0.0) return {1.0, 1.0};
  if (!std::isfinite(min_delta)) min_delta = max_delta;
  return {max_delta / std::log(2.0), min_delta / std::log(100.0)};
}

}  // namespace

AnnealResult simulated_anneal(const QuboMatrix& q, const AnnealSchedule& schedule, std::mt19937_64& rng) {
  const std::size_t n = q.size;
  if (n == 0) throw std::invalid_argument("simulated_anneal: empty QUBO");
  auto [t_hot, t_cold] = default_temperatures(q);
  if (schedule.t_start > 0.0) t_hot = schedule.t_start;
  if (schedule.t_end > 0.0) t_cold = schedule.t_end;
  const int sweeps = std::max(1, schedule.sweeps);
  const double ratio = sweeps > 1 ? std::pow(t_cold / t_hot, 1.0 / (sweeps - 1)) : 1.0;

  AnnealResult best{BitVector(n, 0), q.offset};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  BitVector x(n);
  std::vector<double> field(n);  // sum_{j != i} Q_ij x_j

  for (int restart = 0; restart < std::max(1, schedule.restarts); ++restart) {
    for (auto& b : x) b = coin(rng) ? 1 : 0;
    for (std::size_t i = 0; i < n; ++i) {
      double h = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && x[j]) h += q.at(i, j);
      field[i] = h;
    }
    double energy = q.energy(x);
    if (energy < best.energy) best = {x, energy};

    double temperature = t_hot;
    for (int sweep = 0; sweep < sweeps; ++sweep, temperature *= ratio) {
      for (std::size_t i = 0; i < n; ++i) {
        const double delta = (x[i] ? -1.0 : 1.0) * (q.at(i, i) + 2.0 * field[i]);
        if (delta > 0.0 && unit(rng) >= std::exp(-delta / temperature)) continue;
        const double d = x[i] ? -1.0 : 1.0;
        x[i] ^= 1;
        energy += delta;
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) field[j] += q.at(j, i) * d;
        if (energy < best.energy - 1e-12 * (1.0 + std::abs(best.energy))) best = {x, energy};
      }
    }
  }
  // Incremental energies drift; report the exact value of the returned vector.
  best.energy = q.energy(best.bits);
  return best;
}

}  // namespace swiftband
