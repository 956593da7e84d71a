#include "dast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "dast/budget.hpp"
#include "dast/error.hpp"
#include "dast/rng.hpp"

namespace dast {

void validate(const DifficultyModel& model) {
  if (model.levels.empty()) {
    throw ValidationError("difficulty model has no levels");
  }
  if (model.l_max <= 0) {
    throw ValidationError("difficulty model l_max must be positive");
  }
  if (!(model.sigma_len >= 0.0) || !std::isfinite(model.sigma_len)) {
    throw ValidationError("difficulty model sigma_len must be non-negative");
  }
  if (!(model.incorrect_median_factor > 0.0) || !std::isfinite(model.incorrect_median_factor)) {
    throw ValidationError("difficulty model incorrect_median_factor must be positive");
  }
  for (std::size_t i = 0; i < model.levels.size(); ++i) {
    const LevelParams& lv = model.levels[i];
    if (!(lv.accuracy >= 0.0 && lv.accuracy <= 1.0)) {
      throw ValidationError(fmt::format("level {}: accuracy {} outside [0, 1]", i + 1, lv.accuracy));
    }
    if (!(lv.median_length > 0.0) || !(lv.median_length < static_cast<double>(model.l_max))) {
      throw ValidationError(
          fmt::format("level {}: median_length {} must lie in (0, l_max)", i + 1, lv.median_length));
    }
  }
}

namespace {

TokenCount draw_length(CounterRng& rng, double median, double sigma, TokenCount l_max) {
  const double raw = median * std::exp(sigma * rng.normal());
  const double clamped = std::clamp(std::round(raw), 1.0, static_cast<double>(l_max));
  return static_cast<TokenCount>(clamped);
}

}  // namespace

SynthDataset generate(const DifficultyModel& model, int questions_per_level, int n,
                      std::uint64_t seed) {
  validate(model);
  if (questions_per_level < 1) {
    throw ValidationError("questions_per_level must be at least 1");
  }
  if (n < 1) {
    throw ValidationError("samples per question must be at least 1");
  }

  SynthDataset ds;
  ds.seed = seed;
  const CounterRng root(seed);
  const auto levels = static_cast<int>(model.levels.size());
  ds.questions.reserve(static_cast<std::size_t>(levels * questions_per_level));
  ds.samples.reserve(static_cast<std::size_t>(levels * questions_per_level * n));

  std::uint64_t index = 0;
  for (int level = 1; level <= levels; ++level) {
    const LevelParams& lv = model.levels[static_cast<std::size_t>(level - 1)];
    for (int q = 0; q < questions_per_level; ++q, ++index) {
      Question question{fmt::format("L{}-q{:04}", level, q), level, model.l_max};
      CounterRng rng = root.child(index);
      for (int j = 0; j < n; ++j) {
        Sample s;
        s.question_id = question.id;
        s.sample_id = fmt::format("{}-s{:02}", question.id, j);
        s.correct = rng.uniform() < lv.accuracy;
        const double median =
            s.correct ? lv.median_length : lv.median_length * model.incorrect_median_factor;
        s.token_len = draw_length(rng, median, model.sigma_len, model.l_max);
        ds.samples.push_back(std::move(s));
      }
      ds.questions.push_back(std::move(question));
    }
  }
  return ds;
}

std::vector<LevelTrend> trend_report(const SynthDataset& dataset) {
  const GroupedSamples grouped = group_samples(dataset.questions, dataset.samples);
  if (!grouped.missing.empty()) {
    throw ValidationError("question " + grouped.missing.front() + " has no samples");
  }

  struct Acc {
    std::size_t questions = 0;
    double accuracy = 0.0;
    double tlb = 0.0;
    std::int64_t length_sum = 0;
    std::int64_t samples = 0;
  };
  std::map<int, Acc> by_level;
  for (const QuestionSamples& g : grouped.groups) {
    if (!g.question.difficulty_label) {
      throw ValidationError("question " + g.question.id + " has no difficulty_label");
    }
    const BudgetReport r = compute_tlb(g.question, g.samples);
    Acc& a = by_level[*g.question.difficulty_label];
    ++a.questions;
    a.accuracy += r.p;
    a.tlb += r.l_budget;
    for (const Sample& s : g.samples) {
      a.length_sum += s.token_len;
      ++a.samples;
    }
  }

  std::vector<LevelTrend> rows;
  for (const auto& [level, a] : by_level) {
    const auto nq = static_cast<double>(a.questions);
    rows.push_back({level, a.questions, a.accuracy / nq,
                    static_cast<double>(a.length_sum) / static_cast<double>(a.samples), a.tlb / nq});
  }
  return rows;
}

}  // namespace dast
