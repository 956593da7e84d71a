#include "dast/reward.hpp"

#include <algorithm>

#include "dast/error.hpp"

namespace dast {

namespace {

constexpr double kCorrectSlope = -0.5;
constexpr double kCorrectIntercept = 0.5;
constexpr double kCorrectFloor = 0.1;
constexpr double kIncorrectSlope = 0.9;
constexpr double kIncorrectIntercept = -0.1;
constexpr double kIncorrectCeiling = -0.1;

double relative_deviation(TokenCount token_len, double l_budget) {
  if (!(l_budget > 0.0)) {
    throw ValidationError("degenerate budget");
  }
  return (static_cast<double>(token_len) - l_budget) / l_budget;
}

}  // namespace

double calibrated_reward(bool correct, double lambda) {
  if (correct) {
    return std::max(kCorrectSlope * lambda + kCorrectIntercept, kCorrectFloor);
  }
  return std::min(kIncorrectSlope * lambda + kIncorrectIntercept, kIncorrectCeiling);
}

ScoredSample calibrate(const Sample& sample, const BudgetReport& report,
                       const RewardFunction& reward_fn) {
  if (sample.question_id != report.question_id) {
    throw ValidationError("sample " + sample.sample_id + " scored against budget of question " +
                          report.question_id);
  }
  if (sample.token_len < 0) {
    throw ValidationError("sample " + sample.sample_id + ": negative token_len");
  }
  ScoredSample out;
  out.sample = sample;
  out.lambda = relative_deviation(sample.token_len, report.l_budget);
  out.reward = reward_fn(sample.correct, out.lambda);
  return out;
}

ScoredSample calibrate(const Sample& sample, const BudgetReport& report) {
  return calibrate(sample, report, calibrated_reward);
}

std::vector<ScoredSample> calibrate_all(std::span<const Sample> samples, const BudgetReport& report) {
  std::vector<ScoredSample> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) {
    out.push_back(calibrate(s, report));
  }
  return out;
}

std::vector<RewardPoint> reward_curve(const BudgetReport& report, std::span<const TokenCount> grid) {
  std::vector<RewardPoint> curve;
  curve.reserve(grid.size());
  for (TokenCount len : grid) {
    if (len < 0) {
      throw ValidationError("reward curve grid contains negative length " + std::to_string(len));
    }
    const double lambda = relative_deviation(len, report.l_budget);
    curve.push_back({len, calibrated_reward(true, lambda), calibrated_reward(false, lambda)});
  }
  return curve;
}

}  // namespace dast
