#include "dast/budget.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "dast/error.hpp"

namespace dast {

BudgetReport compute_tlb(const Question& question, std::span<const Sample> samples,
                         const TlbOptions& options) {
  if (question.l_max <= 0) {
    throw ValidationError("question " + question.id + ": l_max must be positive");
  }
  if (samples.empty()) {
    throw ValidationError("no samples");
  }

  std::int64_t n = 0;
  std::int64_t c = 0;
  std::int64_t correct_len_sum = 0;
  for (const Sample& s : samples) {
    if (s.question_id != question.id) {
      throw ValidationError("mismatched question: sample " + s.sample_id + " belongs to " +
                            s.question_id + ", expected " + question.id);
    }
    if (s.token_len < 0 || s.token_len > question.l_max) {
      throw ValidationError("sample " + s.sample_id + ": token_len " +
                            std::to_string(s.token_len) + " outside [0, " +
                            std::to_string(question.l_max) + "]");
    }
    if (options.exclude_truncated && s.token_len == question.l_max) {
      continue;
    }
    ++n;
    if (s.correct) {
      ++c;
      correct_len_sum += s.token_len;
    }
  }
  if (n == 0) {
    throw ValidationError("no samples");
  }

  BudgetReport report;
  report.question_id = question.id;
  report.n = n;
  report.c = c;
  report.p = static_cast<double>(c) / static_cast<double>(n);

  const auto l_max = static_cast<double>(question.l_max);
  if (c == 0) {
    report.l_bar_r = 0.0;
    report.l_budget = l_max;
  } else if (c == n) {
    report.l_bar_r = static_cast<double>(correct_len_sum) / static_cast<double>(c);
    report.l_budget = report.l_bar_r;
  } else {
    report.l_bar_r = static_cast<double>(correct_len_sum) / static_cast<double>(c);
    const double mixed = report.p * report.l_bar_r + (1.0 - report.p) * l_max;
    // Rounding can push the sum one ulp outside the segment.
    report.l_budget = std::clamp(mixed, std::min(report.l_bar_r, l_max),
                                 std::max(report.l_bar_r, l_max));
  }
  return report;
}

std::vector<BudgetReport> batch_tlb(std::span<const QuestionSamples> dataset,
                                    const TlbOptions& options) {
  std::vector<BudgetReport> reports;
  reports.reserve(dataset.size());
  for (const QuestionSamples& group : dataset) {
    try {
      reports.push_back(compute_tlb(group.question, group.samples, options));
    } catch (const ValidationError& e) {
      throw ValidationError("question " + group.question.id + ": " + e.what());
    }
  }
  return reports;
}

std::map<int, double> mean_tlb_by_level(std::span<const BudgetReport> reports,
                                        std::span<const Question> questions) {
  std::unordered_map<std::string, const Question*> by_id;
  for (const Question& q : questions) {
    by_id.emplace(q.id, &q);
  }

  std::map<int, std::pair<double, std::int64_t>> acc;
  for (const BudgetReport& r : reports) {
    auto it = by_id.find(r.question_id);
    if (it == by_id.end()) {
      throw ValidationError("budget report for unknown question " + r.question_id);
    }
    if (!it->second->difficulty_label) {
      throw ValidationError("question " + r.question_id + " has no difficulty_label");
    }
    auto& [sum, count] = acc[*it->second->difficulty_label];
    sum += r.l_budget;
    ++count;
  }

  std::map<int, double> means;
  for (const auto& [level, entry] : acc) {
    means.emplace(level, entry.first / static_cast<double>(entry.second));
  }
  return means;
}

GroupedSamples group_samples(std::span<const Question> questions, std::span<const Sample> samples) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    if (!index.emplace(questions[i].id, i).second) {
      throw ValidationError("duplicate question id " + questions[i].id);
    }
  }

  std::vector<std::vector<Sample>> buckets(questions.size());
  std::set<std::string> sample_ids;
  for (const Sample& s : samples) {
    auto it = index.find(s.question_id);
    if (it == index.end()) {
      throw ValidationError("sample " + s.sample_id + " refers to unknown question " +
                            s.question_id);
    }
    if (!sample_ids.insert(s.sample_id).second) {
      throw ValidationError("duplicate sample id " + s.sample_id);
    }
    buckets[it->second].push_back(s);
  }

  GroupedSamples out;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    if (buckets[i].empty()) {
      out.missing.push_back(questions[i].id);
    } else {
      out.groups.push_back({questions[i], std::move(buckets[i])});
    }
  }
  return out;
}

}  // namespace dast
