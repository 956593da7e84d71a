#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dast/budget.hpp"
#include "dast/metrics.hpp"
#include "dast/pairs.hpp"
#include "dast/reward.hpp"
#include "dast/synth.hpp"
#include "dast/toy_policy.hpp"

namespace dast {

// Scores every sample against its question's budget. Groups without a
// matching report are rejected.
std::vector<std::vector<ScoredSample>> score_groups(std::span<const QuestionSamples> groups,
                                                    std::span<const BudgetReport> reports);

// Tags each pair with its question's difficulty label.
std::vector<BinnedPair> bin_pairs(std::span<const PreferencePair> pairs,
                                  std::span<const Question> questions);

// Highest difficulty label among the questions; at least 1.
int bin_count(std::span<const Question> questions);

// Policy whose expected length in each bin equals the mean sample length of
// that bin's questions. Bins without samples get expected length 1.
ToyPolicy policy_from_samples(std::span<const Question> questions, std::span<const Sample> samples,
                              int bins);

// Evaluation run drawn from the toy policy. For each question and draw, one
// uniform decides correctness (probability = the question's sampling
// accuracy) and one uniform sets the length by inverse-CDF geometric sampling,
// capped at l_max. Equal keys give identical uniforms, so two policies
// evaluated with the same key are compared on common random numbers.
std::vector<RunRecord> simulate_run(const ToyPolicy& policy, std::span<const Question> questions,
                                    std::span<const BudgetReport> reports, int draws_per_question,
                                    std::uint64_t key);

struct DemoConfig {
  std::uint64_t seed = 7;
  DifficultyModel model;
  int questions_per_level = 100;
  int samples_per_question = 20;
  TlbOptions tlb;
  BuildOptions build;
  SimPOConfig simpo{2.0, 1.0, 5.0, 100};
  int eval_draws_per_question = 4;
};

struct DemoChecks {
  bool tlb_monotone = false;
  bool compression_non_increasing = false;
  bool degenerate_truncation = false;  // delta == 0
};

struct DemoResult {
  SynthDataset dataset;
  std::vector<BudgetReport> budgets;
  std::vector<LevelTrend> trend;
  PairDataset pairs;
  ToyPolicy initial_policy;
  ToyTrainResult training;
  std::vector<RunRecord> baseline_run;
  std::vector<RunRecord> treated_run;
  MetricsReport overall;
  std::map<int, MetricsReport> by_level;
  DemoChecks checks;
};

// generate -> budget -> pairs -> train-toy -> eval, all in memory.
DemoResult run_demo(const DemoConfig& config);

// Writes every stage's artifacts plus summary.md and run_metadata.json.
// Output is a pure function of the result and config.
void write_demo(const DemoResult& result, const DemoConfig& config,
                const std::filesystem::path& out_dir);

inline constexpr const char* kDeltaZeroWarning =
    "delta = 0 keeps every candidate pair, including low-margin DICPs with long losers; "
    "these can dominate training and push lengths the wrong way (low or negative compression).";

// CSV renderers shared by the CLI and the demo.
std::string trend_csv(std::span<const LevelTrend> rows);
std::string loss_trace_csv(std::span<const double> trace);
std::string expected_length_csv(const ToyPolicy& before, const ToyPolicy& after);
std::string metrics_by_level_csv(const std::map<int, MetricsReport>& by_level);
std::string reward_curve_csv(std::span<const RewardPoint> curve);

}  // namespace dast
