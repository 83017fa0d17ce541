#pragma once

#include <span>
#include <vector>

namespace swiftband {

/// One successive-halving stage: `trials` live trials trained to a
/// cumulative `budget` epochs.
struct RoundSpec {
  int trials = 0;
  int budget = 0;

  bool operator==(const RoundSpec&) const = default;
};

struct BracketPlan {
  int s = 0;
  std::vector<RoundSpec> rounds;
};

/// Hyperband schedule with s_max = floor(log_eta R). Bracket s starts
/// n = ceil((s_max+1) / (s+1) * eta^s) trials at R * eta^-s epochs; round i
/// keeps floor(n * eta^-i) trials up to R * eta^(i-s) epochs. Brackets are
/// returned s = s_max first. Integer arithmetic throughout.
/// Throws ConfigError unless R >= eta >= 2.
std::vector<BracketPlan> plan_hyperband(int max_epochs, int eta);

/// Epochs consumed when every round trains all its trials from the previous
/// round's budget.
long planned_epochs(const BracketPlan& bracket);
long planned_epochs(std::span<const BracketPlan> plan);

/// Trials drawn over all brackets.
int planned_trials(std::span<const BracketPlan> plan);

}  // namespace swiftband
