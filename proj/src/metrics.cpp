#include "dast/metrics.hpp"

#include <fmt/format.h>

#include "dast/error.hpp"

namespace dast {

RunSummary summarize(std::span<const RunRecord> run) {
  if (run.empty()) {
    throw ValidationError("summarize: empty run");
  }
  std::int64_t correct = 0;
  std::int64_t len_sum = 0;
  std::int64_t correct_len_sum = 0;
  for (const RunRecord& r : run) {
    if (r.token_len < 0) {
      throw ValidationError("record for question " + r.question_id + " has negative token_len");
    }
    len_sum += r.token_len;
    if (r.correct) {
      ++correct;
      correct_len_sum += r.token_len;
    }
  }
  const auto n = static_cast<double>(run.size());
  RunSummary s;
  s.count = run.size();
  s.acc = static_cast<double>(correct) / n;
  s.len = static_cast<double>(len_sum) / n;
  if (correct > 0) {
    s.c_len = static_cast<double>(correct_len_sum) / static_cast<double>(correct);
  }
  return s;
}

MetricsReport compare(std::span<const RunRecord> baseline, std::span<const RunRecord> treated) {
  MetricsReport m;
  m.baseline = summarize(baseline);
  m.treated = summarize(treated);
  if (m.baseline.len == 0.0) {
    throw ValidationError("compare: baseline mean length is 0");
  }
  m.acc = m.treated.acc;
  m.len = m.treated.len;
  m.c_len = m.treated.c_len;
  m.cr = 1.0 - m.treated.len / m.baseline.len;
  if (m.baseline.c_len && m.treated.c_len && *m.baseline.c_len > 0.0) {
    m.c_cr = 1.0 - *m.treated.c_len / *m.baseline.c_len;
  }
  return m;
}

namespace {

std::map<int, std::vector<RunRecord>> split_by_level(std::span<const RunRecord> run,
                                                     const char* which) {
  std::map<int, std::vector<RunRecord>> out;
  for (std::size_t i = 0; i < run.size(); ++i) {
    if (!run[i].difficulty_label) {
      throw ValidationError(fmt::format("{} record {} (question {}) has no difficulty_label",
                                        which, i + 1, run[i].question_id));
    }
    out[*run[i].difficulty_label].push_back(run[i]);
  }
  return out;
}

}  // namespace

std::map<int, MetricsReport> compare_by_level(std::span<const RunRecord> baseline,
                                              std::span<const RunRecord> treated) {
  const auto base = split_by_level(baseline, "baseline");
  const auto treat = split_by_level(treated, "treated");
  for (const auto& [level, recs] : treat) {
    if (!base.contains(level)) {
      throw ValidationError(fmt::format("level {} present in treated run but not in baseline", level));
    }
  }
  std::map<int, MetricsReport> out;
  for (const auto& [level, recs] : base) {
    auto it = treat.find(level);
    if (it == treat.end()) {
      throw ValidationError(fmt::format("level {} present in baseline run but not in treated", level));
    }
    out.emplace(level, compare(recs, it->second));
  }
  return out;
}

std::string format_percent(double fraction) { return fmt::format("{:.1f}%", 100.0 * fraction); }

}  // namespace dast
