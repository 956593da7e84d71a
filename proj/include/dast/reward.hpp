#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dast/types.hpp"

namespace dast {

struct ScoredSample {
  Sample sample;
  // Relative deviation from the budget: (token_len - l_budget) / l_budget.
  double lambda = 0.0;
  double reward = 0.0;

  bool operator==(const ScoredSample&) const = default;
};

// Budget-calibrated reward for a given correctness and relative deviation.
//   correct:   max(-0.5 * lambda + 0.5, 0.1)
//   incorrect: min( 0.9 * lambda - 0.1, -0.1)
// Correct rewards lie in [0.1, 1.0] and incorrect ones in [-1.0, -0.1] for
// lambda >= -1, so the two branches never overlap.
double calibrated_reward(bool correct, double lambda);

// Alternative reward shapes can be injected here for experiments. None ship
// with the library; calibrate() without one uses calibrated_reward.
using RewardFunction = std::function<double(bool correct, double lambda)>;

// Throws ValidationError when the report is for another question or when
// l_budget <= 0 ("degenerate budget").
ScoredSample calibrate(const Sample& sample, const BudgetReport& report);
ScoredSample calibrate(const Sample& sample, const BudgetReport& report,
                       const RewardFunction& reward_fn);

std::vector<ScoredSample> calibrate_all(std::span<const Sample> samples, const BudgetReport& report);

struct RewardPoint {
  TokenCount token_len = 0;
  double reward_correct = 0.0;
  double reward_incorrect = 0.0;
};

// Both reward branches tabulated over a grid of token lengths.
std::vector<RewardPoint> reward_curve(const BudgetReport& report, std::span<const TokenCount> grid);

}  // namespace dast
