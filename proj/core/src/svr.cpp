#include "swiftband/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace swiftband {

namespace {

constexpr double kTau = 1e-12;

}  // namespace

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

std::vector<double> kernel_matrix(const std::vector<FeatureVector>& inputs, double gamma) {
  const std::size_t n = inputs.size();
  std::vector<double> K(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    K[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) K[i * n + j] = K[j * n + i] = rbf_kernel(inputs[i], inputs[j], gamma);
  }
  return K;
}

double svr_dual_objective(std::span<const double> K, std::span<const double> y, std::span<const double> beta,
                          double epsilon) {
  const std::size_t n = y.size();
  double quad = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += K[i * n + j] * beta[j];
    quad += beta[i] * row;
    lin += y[i] * beta[i] - epsilon * std::abs(beta[i]);
  }
  return -0.5 * quad + lin;
}

DualSolution solve_svr_dual(std::span<const double> K, std::span<const double> y, double C, double epsilon,
                            double tolerance, long max_iterations) {
  const std::size_t n = y.size();
  if (K.size() != n * n) throw std::invalid_argument("solve_svr_dual: kernel size does not match targets");
  if (!(C > 0.0)) throw std::invalid_argument("solve_svr_dual: C must be positive");
  // Variables 0..n-1 are alpha (sign +1), n..2n-1 are alpha* (sign -1), as a
  // minimization of 1/2 a'Qa + p'a with Q_st = s_s s_t K.
  const std::size_t m = 2 * n;
  auto point = [n](std::size_t t) { return t < n ? t : t - n; };
  auto sign = [n](std::size_t t) { return t < n ? 1.0 : -1.0; };
  auto q = [&](std::size_t s, std::size_t t) { return sign(s) * sign(t) * K[point(s) * n + point(t)]; };

  std::vector<double> a(m, 0.0), p(m), G(m);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = epsilon - y[i];
    p[n + i] = epsilon + y[i];
  }
  G = p;
  auto upper = [&](std::size_t t) { return a[t] >= C; };
  auto lower = [&](std::size_t t) { return a[t] <= 0.0; };

  DualSolution out;
  long iter = 0;
  for (; iter < max_iterations; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t i = -1, j = -1;
    for (std::size_t t = 0; t < m; ++t) {
      if (sign(t) > 0) {
        if (!upper(t) && -G[t] >= gmax) gmax = -G[t], i = static_cast<std::ptrdiff_t>(t);
      } else {
        if (!lower(t) && G[t] >= gmax) gmax = G[t], i = static_cast<std::ptrdiff_t>(t);
      }
    }
    if (i < 0) break;
    const auto ii = static_cast<std::size_t>(i);
    double best_obj = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < m; ++t) {
      double grad_diff = 0.0;
      if (sign(t) > 0) {
        if (lower(t)) continue;
        gmax2 = std::max(gmax2, G[t]);
        grad_diff = gmax + G[t];
      } else {
        if (upper(t)) continue;
        gmax2 = std::max(gmax2, -G[t]);
        grad_diff = gmax - G[t];
      }
      if (grad_diff <= 0.0) continue;
      double quad = K[point(ii) * n + point(ii)] + K[point(t) * n + point(t)] - 2.0 * K[point(ii) * n + point(t)];
      if (quad <= 0.0) quad = kTau;
      const double obj = -(grad_diff * grad_diff) / quad;
      if (obj <= best_obj) best_obj = obj, j = static_cast<std::ptrdiff_t>(t);
    }
    if (gmax + gmax2 < tolerance || j < 0) break;
    const auto jj = static_cast<std::size_t>(j);

    const double old_i = a[ii], old_j = a[jj];
    const double qij = q(ii, jj);
    const double qii = K[point(ii) * n + point(ii)], qjj = K[point(jj) * n + point(jj)];
    if (sign(ii) != sign(jj)) {
      double quad = qii + qjj + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-G[ii] - G[jj]) / quad;
      const double diff = a[ii] - a[jj];
      a[ii] += delta;
      a[jj] += delta;
      if (diff > 0.0) {
        if (a[jj] < 0.0) a[jj] = 0.0, a[ii] = diff;
      } else {
        if (a[ii] < 0.0) a[ii] = 0.0, a[jj] = -diff;
      }
      if (diff > 0.0) {
        if (a[ii] > C) a[ii] = C, a[jj] = C - diff;
      } else {
        if (a[jj] > C) a[jj] = C, a[ii] = C + diff;
      }
    } else {
      double quad = qii + qjj - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (G[ii] - G[jj]) / quad;
      const double sum = a[ii] + a[jj];
      a[ii] -= delta;
      a[jj] += delta;
      if (sum > C) {
        if (a[ii] > C) a[ii] = C, a[jj] = sum - C;
      } else {
        if (a[jj] < 0.0) a[jj] = 0.0, a[ii] = sum;
      }
      if (sum > C) {
        if (a[jj] > C) a[jj] = C, a[ii] = sum - C;
      } else {
        if (a[ii] < 0.0) a[ii] = 0.0, a[jj] = sum;
      }
    }
    const double di = a[ii] - old_i, dj = a[jj] - old_j;
    for (std::size_t t = 0; t < m; ++t) G[t] += q(ii, t) * di + q(jj, t) * dj;
  }
  out.iterations = iter;
  out.hit_iteration_cap = iter >= max_iterations;

  // Bias from the free variables, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  int nr_free = 0;
  for (std::size_t t = 0; t < m; ++t) {
    const double yg = sign(t) * G[t];
    if (upper(t)) {
      if (sign(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (sign(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++nr_free;
      sum_free += yg;
    }
  }
  const double rho = nr_free > 0 ? sum_free / nr_free : (ub + lb) / 2.0;
  out.bias = -rho;

  out.beta.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.beta[i] = a[i] - a[n + i];
  double f = 0.0;
  for (std::size_t t = 0; t < m; ++t) f += a[t] * (G[t] + p[t]);
  out.objective = -0.5 * f;
  return out;
}

StandardizedData standardize(const std::vector<FeatureVector>& X, std::span<const double> y,
                             std::optional<double> gamma) {
  const std::size_t n = X.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("SVR training needs >= 2 samples with matching targets");
  const std::size_t d = X.front().size();
  for (const auto& row : X) {
    if (row.size() != d) throw std::invalid_argument("SVR training inputs have unequal lengths");
    for (double v : row)
      if (!std::isfinite(v)) throw std::invalid_argument("SVR training input is not finite");
  }
  for (double v : y)
    if (!std::isfinite(v)) throw std::invalid_argument("SVR training target is not finite");

  StandardizedData out;
  out.feature_mean.assign(d, 0.0);
  out.feature_scale.assign(d, 1.0);
  for (std::size_t k = 0; k < d; ++k) {
    double mean = 0.0;
    for (const auto& row : X) mean += row[k];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& row : X) var += (row[k] - mean) * (row[k] - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    out.feature_mean[k] = mean;
    out.feature_scale[k] = sd > 1e-12 ? sd : 1.0;
  }
  out.inputs.resize(n, FeatureVector(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) out.inputs[i][k] = (X[i][k] - out.feature_mean[k]) / out.feature_scale[k];

  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  out.target_mean = mean;
  out.target_scale = sd > 1e-12 ? sd : 1.0;
  out.targets.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.targets[i] = (y[i] - mean) / out.target_scale;

  out.gamma = gamma.value_or(d > 0 ? 1.0 / static_cast<double>(d) : 1.0);
  out.kernel = kernel_matrix(out.inputs, out.gamma);
  return out;
}

double SvrModel::predict(std::span<const double> x) const {
  if (x.size() != feature_mean.size())
    throw std::invalid_argument("predict: expected " + std::to_string(feature_mean.size()) + " features, got " +
                                std::to_string(x.size()));
  FeatureVector z(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) z[k] = (x[k] - feature_mean[k]) / feature_scale[k];
  double f = bias;
  for (std::size_t i = 0; i < inputs.size(); ++i)
    if (beta[i] != 0.0) f += beta[i] * rbf_kernel(inputs[i], z, gamma);
  return target_mean + target_scale * f;
}

SvrModel train_svr(const std::vector<FeatureVector>& X, std::span<const double> y, const SvrParams& params) {
  auto data = standardize(X, y, params.gamma);
  auto dual = solve_svr_dual(data.kernel, data.targets, params.C, params.epsilon, params.tolerance,
                             params.max_iterations);
  SvrModel model;
  model.inputs = std::move(data.inputs);
  model.beta = std::move(dual.beta);
  model.bias = dual.bias;
  model.gamma = data.gamma;
  model.C = params.C;
  model.epsilon = params.epsilon;
  model.feature_mean = std::move(data.feature_mean);
  model.feature_scale = std::move(data.feature_scale);
  model.target_mean = data.target_mean;
  model.target_scale = data.target_scale;
  model.hit_iteration_cap = dual.hit_iteration_cap;
  return model;
}

double loocv_std(const std::vector<FeatureVector>& X, std::span<const double> y, const SvrParams& params) {
  const std::size_t n = X.size();
  if (n < 3 || y.size() != n) throw std::invalid_argument("loocv_std: need at least 3 samples");
  std::vector<double> residuals(n);
  std::vector<FeatureVector> train_x;
  std::vector<double> train_y;
  for (std::size_t out = 0; out < n; ++out) {
    train_x.clear();
    train_y.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (i == out) continue;
      train_x.push_back(X[i]);
      train_y.push_back(y[i]);
    }
    const auto model = train_svr(train_x, train_y, params);
    residuals[out] = y[out] - model.predict(X[out]);
  }
  double mean = 0.0;
  for (double r : residuals) mean += r;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double r : residuals) var += (r - mean) * (r - mean);
  return std::sqrt(var / static_cast<double>(n));
}

void to_json(nlohmann::json& j, const SvrModel& m) {
  j = nlohmann::json{{"kernel", "rbf"},
                     {"gamma", m.gamma},
                     {"C", m.C},
                     {"epsilon", m.epsilon},
                     {"bias", m.bias},
                     {"beta", m.beta},
                     {"inputs", m.inputs},
                     {"feature_mean", m.feature_mean},
                     {"feature_scale", m.feature_scale},
                     {"target_mean", m.target_mean},
                     {"target_scale", m.target_scale},
                     {"hit_iteration_cap", m.hit_iteration_cap}};
}

void from_json(const nlohmann::json& j, SvrModel& m) {
  if (j.value("kernel", std::string("rbf")) != "rbf") throw std::invalid_argument("only rbf kernels are supported");
  m.gamma = j.at("gamma").get<double>();
  m.C = j.at("C").get<double>();
  m.epsilon = j.at("epsilon").get<double>();
  m.bias = j.at("bias").get<double>();
  m.beta = j.at("beta").get<std::vector<double>>();
  m.inputs = j.at("inputs").get<std::vector<FeatureVector>>();
  m.feature_mean = j.at("feature_mean").get<std::vector<double>>();
  m.feature_scale = j.at("feature_scale").get<std::vector<double>>();
  m.target_mean = j.at("target_mean").get<double>();
  m.target_scale = j.at("target_scale").get<double>();
  m.hit_iteration_cap = j.value("hit_iteration_cap", false);
  if (m.beta.size() != m.inputs.size() || m.feature_mean.size() != m.feature_scale.size())
    throw std::invalid_argument("inconsistent SVR model dump");
}

}  // namespace swiftband
