#pragma once

#include <map>
#include <span>
#include <vector>

#include "dast/types.hpp"

namespace dast {

struct TlbOptions {
  // Drop samples that hit the generation cap (token_len == l_max) before
  // counting. Off by default: truncated generations count like any other.
  bool exclude_truncated = false;
};

struct QuestionSamples {
  Question question;
  std::vector<Sample> samples;
};

// Computes the Token Length Budget of one question from its samples.
// Throws ValidationError on an empty sample list ("no samples"), on a sample
// of another question ("mismatched question"), or on a sample longer than
// l_max.
BudgetReport compute_tlb(const Question& question, std::span<const Sample> samples,
                         const TlbOptions& options = {});

// One report per group, in input order. Errors carry the question id.
std::vector<BudgetReport> batch_tlb(std::span<const QuestionSamples> dataset,
                                    const TlbOptions& options = {});

// Mean l_budget per difficulty label. Every report must join to a question
// carrying a label.
std::map<int, double> mean_tlb_by_level(std::span<const BudgetReport> reports,
                                        std::span<const Question> questions);

// Groups flat question/sample lists by question, preserving question order.
// Samples of unknown questions are rejected; questions without samples are
// returned in `missing` instead of `groups`.
struct GroupedSamples {
  std::vector<QuestionSamples> groups;
  std::vector<std::string> missing;
};
GroupedSamples group_samples(std::span<const Question> questions, std::span<const Sample> samples);

}  // namespace dast
