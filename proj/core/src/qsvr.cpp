#include "swiftband/qsvr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace swiftband {

QuboProblem build_svr_qubo(std::span<const double> K, std::span<const double> y, double C, double epsilon,
                           int bits, double penalty) {
  const std::size_t n = y.size();
  if (bits < 1) throw std::invalid_argument("svr_to_qubo: need at least one bit per coefficient");
  if (K.size() != n * n) throw std::invalid_argument("svr_to_qubo: kernel size does not match targets");
  QuboProblem problem;
  problem.encoding = {bits, C / (std::ldexp(1.0, bits) - 1.0), 0.0};
  problem.C = C;
  problem.epsilon = epsilon;
  problem.penalty = penalty;
  problem.kernel.assign(K.begin(), K.end());
  problem.targets.assign(y.begin(), y.end());

  const std::size_t kb = static_cast<std::size_t>(bits);
  const std::size_t vars = 2 * kb * n;
  // beta_i = sum_v c_v x_v over the 2K variables of point i.
  std::vector<double> coef(vars);
  std::vector<std::size_t> owner(vars);
  for (std::size_t v = 0; v < vars; ++v) {
    const std::size_t group = v / kb;
    const double weight = problem.encoding.scale * std::ldexp(1.0, static_cast<int>(v % kb));
    coef[v] = group < n ? weight : -weight;
    owner[v] = group < n ? group : group - n;
  }
  QuboMatrix q(vars);
  for (std::size_t v = 0; v < vars; ++v) {
    for (std::size_t u = 0; u < vars; ++u) {
      q.at(v, u) = (0.5 * K[owner[v] * n + owner[u]] + penalty) * coef[v] * coef[u];
    }
    // x_v^2 = x_v folds the linear terms onto the diagonal.
    q.at(v, v) += epsilon * std::abs(coef[v]) - y[owner[v]] * coef[v];
  }
  problem.matrix = std::move(q);
  return problem;
}

QuboProblem svr_to_qubo(const std::vector<FeatureVector>& X, std::span<const double> y, const SvrParams& svr,
                        const QsvrParams& qsvr) {
  if (X.size() > qsvr.sample_cap)
    throw std::invalid_argument("svr_to_qubo: " + std::to_string(X.size()) + " samples exceed the cap of " +
                                std::to_string(qsvr.sample_cap));
  auto data = standardize(X, y, svr.gamma);
  double max_abs = 0.0;
  for (double v : data.targets) max_abs = std::max(max_abs, std::abs(v));
  const double penalty = qsvr.penalty.value_or(5.0 * std::max(max_abs, 1e-12) * qsvr.C);
  auto problem = build_svr_qubo(data.kernel, data.targets, qsvr.C, svr.epsilon, qsvr.bits, penalty);
  problem.data = std::move(data);
  return problem;
}

DecodedCoefficients decode_coefficients(const QuboProblem& problem, std::span<const std::uint8_t> bits) {
  if (bits.size() != problem.matrix.size)
    throw std::invalid_argument("decode_qsvr: expected " + std::to_string(problem.matrix.size) + " bits, got " +
                                std::to_string(bits.size()));
  const std::size_t n = problem.samples();
  const std::size_t kb = static_cast<std::size_t>(problem.encoding.bits);
  DecodedCoefficients out{std::vector<double>(n, problem.encoding.offset),
                          std::vector<double>(n, problem.encoding.offset)};
  for (std::size_t v = 0; v < bits.size(); ++v) {
    if (!bits[v]) continue;
    const std::size_t group = v / kb;
    const double weight = problem.encoding.scale * std::ldexp(1.0, static_cast<int>(v % kb));
    if (group < n) {
      out.alpha[group] += weight;
    } else {
      out.alpha_star[group - n] += weight;
    }
  }
  return out;
}

double penalized_negated_dual(std::span<const double> K, std::span<const double> y, const DecodedCoefficients& c,
                              double epsilon, double penalty) {
  const std::size_t n = y.size();
  std::vector<double> beta(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    beta[i] = c.alpha[i] - c.alpha_star[i];
    sum += beta[i];
  }
  double value = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += K[i * n + j] * beta[j];
    value += 0.5 * beta[i] * row + epsilon * (c.alpha[i] + c.alpha_star[i]) - y[i] * beta[i];
  }
  return value + penalty * sum * sum;
}

SvrModel decode_qsvr(const QuboProblem& problem, std::span<const std::uint8_t> bits) {
  const auto coeffs = decode_coefficients(problem, bits);
  const std::size_t n = problem.samples();
  const auto& K = problem.kernel;
  const auto& y = problem.targets;
  std::vector<double> beta(n), fitted(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) beta[i] = coeffs.alpha[i] - coeffs.alpha_star[i];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) fitted[i] += K[i * n + j] * beta[j];

  const double inside_tol = 1e-12 * std::max(1.0, problem.C);
  auto inside = [&](double a) { return a > inside_tol && a < problem.C - inside_tol; };
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (inside(coeffs.alpha[i])) sum += y[i] - fitted[i] - problem.epsilon, ++count;
    if (inside(coeffs.alpha_star[i])) sum += y[i] - fitted[i] + problem.epsilon, ++count;
  }
  double bias = 0.0;
  if (count > 0) {
    bias = sum / count;
  } else {
    std::vector<double> residual(n);
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - fitted[i];
    std::sort(residual.begin(), residual.end());
    bias = n % 2 == 1 ? residual[n / 2] : 0.5 * (residual[n / 2 - 1] + residual[n / 2]);
  }

  SvrModel model;
  model.beta = std::move(beta);
  model.bias = bias;
  model.C = problem.C;
  model.epsilon = problem.epsilon;
  const auto& data = problem.data;
  if (data.inputs.empty()) {
    // Built from a raw kernel: there is no feature space to evaluate.
    model.target_mean = 0.0;
    model.target_scale = 1.0;
    return model;
  }
  model.inputs = data.inputs;
  model.gamma = data.gamma;
  model.feature_mean = data.feature_mean;
  model.feature_scale = data.feature_scale;
  model.target_mean = data.target_mean;
  model.target_scale = data.target_scale;
  return model;
}

SvrModel train_qsvr(const std::vector<FeatureVector>& X, std::span<const double> y, const SvrParams& svr,
                    const QsvrParams& qsvr, std::mt19937_64& rng) {
  const auto problem = svr_to_qubo(X, y, svr, qsvr);
  const auto result = simulated_anneal(problem.matrix, qsvr.schedule, rng);
  return decode_qsvr(problem, result.bits);
}

}  // namespace swiftband
