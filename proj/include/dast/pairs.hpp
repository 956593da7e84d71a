#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dast/reward.hpp"

namespace dast {

// DCP: both correct. DICP: both incorrect. CICP: exactly one correct.
enum class PairKind { DCP, DICP, CICP };

std::string_view to_string(PairKind kind);
std::optional<PairKind> parse_pair_kind(std::string_view text);
PairKind kind_for(bool a_correct, bool b_correct);

struct PreferencePair {
  std::string question_id;
  std::string winner;
  std::string loser;
  PairKind kind = PairKind::DCP;
  // reward(winner) - reward(loser), always > 0.
  double margin = 0.0;
  TokenCount winner_len = 0;
  TokenCount loser_len = 0;

  bool operator==(const PreferencePair&) const = default;
};

struct PairKinds {
  bool dcp = true;
  bool dicp = true;
  bool cicp = false;

  bool any() const { return dcp || dicp || cicp; }
  bool enabled(PairKind kind) const;
};

// For every enabled kind, the single pair of that kind with the largest
// reward margin among the question's samples. Ties go to the larger length
// gap, then to the lexicographically smaller (winner, loser) id pair.
// Zero-margin candidates are never returned. Output order: DCP, DICP, CICP.
std::vector<PreferencePair> best_pairs_for_question(std::span<const ScoredSample> scored,
                                                    const PairKinds& kinds);

// Drops the floor(delta * |pairs|) smallest-margin pairs. Equal margins are
// dropped in input order. Survivors keep their input order.
std::vector<PreferencePair> truncate_by_margin(std::span<const PreferencePair> pairs, double delta);

// Same rule applied separately to each kind, with |D| counted per kind.
std::vector<PreferencePair> truncate_by_margin_per_kind(std::span<const PreferencePair> pairs,
                                                        double delta);

// Keeps, per question, the highest-margin DCP and the highest-margin DICP.
// CICP pairs pass through uncapped. Survivors keep their input order.
std::vector<PreferencePair> cap_per_question(std::span<const PreferencePair> pairs);

struct PairSummary {
  std::size_t total_pairs = 0;
  std::size_t dcp_count = 0;
  std::size_t dicp_count = 0;
  std::size_t cicp_count = 0;
  // Percentages of total_pairs, in [0, 100]; 0 when there are no pairs.
  double dcp_pct = 0.0;
  double dicp_pct = 0.0;

  bool operator==(const PairSummary&) const = default;
};

PairSummary summarize_pairs(std::span<const PreferencePair> pairs);

struct BuildOptions {
  double delta = 0.15;
  PairKinds kinds;
  bool truncate_per_kind = false;
};

struct PairDataset {
  std::vector<PreferencePair> candidates;  // pooled best pairs before filtering
  std::vector<PreferencePair> pairs;       // after truncation and cap
  PairSummary summary;
};

// Per-question selection, pooled truncation, then the per-question cap.
// Each inner span holds the scored samples of one question.
PairDataset build_dataset(std::span<const std::vector<ScoredSample>> scored_by_question,
                          const BuildOptions& options);

}  // namespace dast
