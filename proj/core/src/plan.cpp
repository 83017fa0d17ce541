#include "swiftband/plan.hpp"

#include <string>

#include "swiftband/error.hpp"

namespace swiftband {

std::vector<BracketPlan> plan_hyperband(int max_epochs, int eta) {
  if (eta < 2) throw ConfigError("eta must be >= 2, got " + std::to_string(eta));
  if (max_epochs < eta)
    throw ConfigError("R must be >= eta (R=" + std::to_string(max_epochs) + ", eta=" + std::to_string(eta) + ")");
  const long R = max_epochs;
  int s_max = 0;
  for (long p = eta; p <= R; p *= eta) ++s_max;

  auto pow = [eta](int e) {
    long v = 1;
    for (int k = 0; k < e; ++k) v *= eta;
    return v;
  };
  std::vector<BracketPlan> plan;
  for (int s = s_max; s >= 0; --s) {
    const long eta_s = pow(s);
    const long num = static_cast<long>(s_max + 1) * eta_s;
    const long n = (num + s) / (s + 1);  // ceil
    BracketPlan bracket{s, {}};
    for (int i = 0; i <= s; ++i) {
      const long eta_i = pow(i);
      bracket.rounds.push_back({static_cast<int>(n / eta_i), static_cast<int>(R * eta_i / eta_s)});
    }
    plan.push_back(std::move(bracket));
  }
  return plan;
}

long planned_epochs(const BracketPlan& bracket) {
  long total = 0;
  int previous = 0;
  for (const auto& round : bracket.rounds) {
    total += static_cast<long>(round.trials) * (round.budget - previous);
    previous = round.budget;
  }
  return total;
}

long planned_epochs(std::span<const BracketPlan> plan) {
  long total = 0;
  for (const auto& bracket : plan) total += planned_epochs(bracket);
  return total;
}

int planned_trials(std::span<const BracketPlan> plan) {
  int total = 0;
  for (const auto& bracket : plan) total += bracket.rounds.front().trials;
  return total;
}

}  // namespace swiftband
