#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "swiftband/svr.hpp"

namespace swiftband::testing {

/// Small one-dimensional epsilon-SVR dual problem on an RBF kernel.
struct SvrProblem {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  double C = 1.0;
  double epsilon = 0.1;
  double gamma = 1.0;

  std::vector<double> kernel() const {
    std::vector<FeatureVector> inputs;
    for (double v : x) inputs.push_back({v});
    return kernel_matrix(inputs, gamma);
  }
};

/// The fixed suite of <= 6-point problems: hand-picked shapes plus seeded
/// random draws over a grid of C, epsilon and gamma.
inline std::vector<SvrProblem> small_svr_problems() {
  std::vector<SvrProblem> out{
      {"two points", {0.0, 1.0}, {0.0, 1.0}, 1.0, 0.1, 1.0},
      {"two points tight box", {0.0, 1.0}, {-2.0, 2.0}, 0.25, 0.05, 1.0},
      {"line", {0.0, 0.5, 1.0, 1.5}, {0.0, 0.5, 1.0, 1.5}, 10.0, 0.01, 0.5},
      {"all inside tube", {0.0, 1.0, 2.0}, {0.01, -0.01, 0.0}, 1.0, 0.5, 1.0},
      {"constant", {0.0, 1.0, 2.0, 3.0}, {1.0, 1.0, 1.0, 1.0}, 1.0, 0.1, 1.0},
      {"step", {-1.0, -0.5, 0.5, 1.0, 1.5}, {0.0, 0.0, 1.0, 1.0, 1.0}, 2.0, 0.05, 2.0},
      {"outlier", {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}, {0.0, 0.1, 5.0, 0.3, 0.4, 0.5}, 1.0, 0.02, 4.0},
      {"duplicate inputs", {0.0, 0.0, 1.0, 1.0}, {0.0, 1.0, 1.0, 2.0}, 1.0, 0.1, 1.0},
      {"sine", {0.0, 1.0, 2.0, 3.0, 4.0, 5.0}, {0.0, 0.841, 0.909, 0.141, -0.757, -0.959}, 5.0, 0.05, 0.5},
  };
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (int n = 2; n <= 6; ++n) {
    for (double C : {0.1, 1.0, 10.0}) {
      for (double eps : {0.0, 0.1}) {
        for (double gamma : {0.3, 3.0}) {
          SvrProblem p;
          p.name = "random n=" + std::to_string(n) + " C=" + std::to_string(C) + " eps=" + std::to_string(eps) +
                   " gamma=" + std::to_string(gamma);
          p.C = C;
          p.epsilon = eps;
          p.gamma = gamma;
          for (int i = 0; i < n; ++i) {
            const double x = coord(rng);
            p.x.push_back(x);
            p.y.push_back(std::sin(x) + noise(rng));
          }
          out.push_back(std::move(p));
        }
      }
    }
  }
  return out;
}

}  // namespace swiftband::testing
