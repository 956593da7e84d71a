#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dast/types.hpp"

namespace dast {

struct RunRecord {
  std::string question_id;
  bool correct = false;
  TokenCount token_len = 0;
  std::optional<int> difficulty_label;

  bool operator==(const RunRecord&) const = default;
};

struct RunSummary {
  std::size_t count = 0;
  double acc = 0.0;
  double len = 0.0;
  std::optional<double> c_len;  // absent when no record is correct
};

// Throws ValidationError on an empty run or a negative token_len.
RunSummary summarize(std::span<const RunRecord> run);

// acc, len and c_len describe the treated run.
//   cr   = 1 - len_treated / len_baseline
//   c_cr = 1 - c_len_treated / c_len_baseline, absent if either c_len is.
struct MetricsReport {
  RunSummary baseline;
  RunSummary treated;
  double acc = 0.0;
  double len = 0.0;
  std::optional<double> c_len;
  double cr = 0.0;
  std::optional<double> c_cr;
};

// Throws ValidationError when the baseline mean length is 0.
MetricsReport compare(std::span<const RunRecord> baseline, std::span<const RunRecord> treated);

// compare() per difficulty label. Every record needs a label, and every
// level present in one run must be present in the other.
std::map<int, MetricsReport> compare_by_level(std::span<const RunRecord> baseline,
                                              std::span<const RunRecord> treated);

// "18.1%" style: percentage with one decimal.
std::string format_percent(double fraction);

}  // namespace dast
