#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dast/types.hpp"

namespace dast {

struct LevelParams {
  double accuracy = 0.0;       // probability a sample is correct
  double median_length = 0.0;  // median of correct-response lengths, tokens

  bool operator==(const LevelParams&) const = default;
};

// Generative model of sampled response lengths per difficulty level. Levels
// are numbered from 1 in vector order. The defaults are illustrative values
// chosen to give easy levels short, mostly correct answers and hard levels
// long, mostly wrong ones; they are not measurements.
struct DifficultyModel {
  std::vector<LevelParams> levels = {
      {0.95, 300.0}, {0.85, 600.0}, {0.70, 1200.0}, {0.45, 2000.0}, {0.15, 3000.0}};
  double sigma_len = 0.4;               // lognormal shape
  double incorrect_median_factor = 1.3;  // incorrect median = factor * correct median
  TokenCount l_max = 4096;

  bool operator==(const DifficultyModel&) const = default;
};

// Throws ValidationError on accuracies outside [0, 1], non-positive medians,
// medians at or above l_max, negative sigma, or an empty level list.
void validate(const DifficultyModel& model);

struct SynthDataset {
  std::vector<Question> questions;
  std::vector<Sample> samples;  // grouped by question, n per question
  std::uint64_t seed = 0;

  bool operator==(const SynthDataset&) const = default;
};

// Question k (0-based, levels in order) draws from CounterRng(seed).child(k).
// Per sample: one uniform decides correctness, then one normal (two uniforms)
// gives length = round(median * exp(sigma * z)) clamped to [1, l_max].
SynthDataset generate(const DifficultyModel& model, int questions_per_level, int n,
                      std::uint64_t seed);

struct LevelTrend {
  int level = 0;
  std::size_t questions = 0;
  double mean_accuracy = 0.0;
  double mean_length = 0.0;
  double mean_tlb = 0.0;
};

// Per-level mean sampling accuracy, mean sample length, and mean budget,
// ordered by level.
std::vector<LevelTrend> trend_report(const SynthDataset& dataset);

}  // namespace dast
