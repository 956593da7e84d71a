#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace dast {

using TokenCount = std::int64_t;

// One problem instance. Difficulty labels are small positive bins (1..5 in
// the synthetic benchmark).
struct Question {
  std::string id;
  std::optional<int> difficulty_label;
  TokenCount l_max = 0;

  bool operator==(const Question&) const = default;
};

// One sampled response. Token lengths are precomputed upstream; nothing in
// this library tokenizes text.
struct Sample {
  std::string question_id;
  std::string sample_id;
  TokenCount token_len = 0;
  bool correct = false;
  // Sum of per-token natural-log probabilities, when the producer has them.
  std::optional<double> logprob_sum;

  bool operator==(const Sample&) const = default;
};

// Token Length Budget for one question.
//
// l_budget = p * l_bar_r + (1 - p) * l_max with p = c / n. When no sample is
// correct l_bar_r is stored as 0 and is unused.
struct BudgetReport {
  std::string question_id;
  std::int64_t n = 0;
  std::int64_t c = 0;
  double p = 0.0;
  double l_bar_r = 0.0;
  double l_budget = 0.0;

  bool operator==(const BudgetReport&) const = default;
};

}  // namespace dast
