#include "dast/pairs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "dast/error.hpp"

namespace dast {

std::string_view to_string(PairKind kind) {
  switch (kind) {
    case PairKind::DCP:
      return "DCP";
    case PairKind::DICP:
      return "DICP";
    case PairKind::CICP:
      return "CICP";
  }
  return "?";
}

std::optional<PairKind> parse_pair_kind(std::string_view text) {
  if (text == "DCP") return PairKind::DCP;
  if (text == "DICP") return PairKind::DICP;
  if (text == "CICP") return PairKind::CICP;
  return std::nullopt;
}

PairKind kind_for(bool a_correct, bool b_correct) {
  if (a_correct && b_correct) return PairKind::DCP;
  if (!a_correct && !b_correct) return PairKind::DICP;
  return PairKind::CICP;
}

bool PairKinds::enabled(PairKind kind) const {
  switch (kind) {
    case PairKind::DCP:
      return dcp;
    case PairKind::DICP:
      return dicp;
    case PairKind::CICP:
      return cicp;
  }
  return false;
}

namespace {

PreferencePair orient(const ScoredSample& a, const ScoredSample& b, PairKind kind) {
  // CICP: the correct sample wins. Sign separation of the rewards makes this
  // the same as the higher-reward rule, but the rule is stated explicitly.
  bool a_wins = a.reward > b.reward;
  if (kind == PairKind::CICP) {
    a_wins = a.sample.correct;
  } else if (a.reward == b.reward) {
    a_wins = a.sample.sample_id < b.sample.sample_id;
  }
  const ScoredSample& w = a_wins ? a : b;
  const ScoredSample& l = a_wins ? b : a;
  return PreferencePair{w.sample.question_id, w.sample.sample_id, l.sample.sample_id, kind,
                        w.reward - l.reward, w.sample.token_len, l.sample.token_len};
}

TokenCount length_gap(const PreferencePair& p) {
  return p.winner_len > p.loser_len ? p.winner_len - p.loser_len : p.loser_len - p.winner_len;
}

// True when `cand` should replace `best`.
bool better(const PreferencePair& cand, const PreferencePair& best) {
  if (cand.margin != best.margin) return cand.margin > best.margin;
  const TokenCount gc = length_gap(cand);
  const TokenCount gb = length_gap(best);
  if (gc != gb) return gc > gb;
  return std::tie(cand.winner, cand.loser) < std::tie(best.winner, best.loser);
}

std::size_t removal_count(std::size_t size, double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw ValidationError("delta must lie in [0, 1), got " + std::to_string(delta));
  }
  return static_cast<std::size_t>(std::floor(delta * static_cast<double>(size)));
}

}  // namespace

std::vector<PreferencePair> best_pairs_for_question(std::span<const ScoredSample> scored,
                                                    const PairKinds& kinds) {
  if (!scored.empty()) {
    const std::string& qid = scored.front().sample.question_id;
    for (const ScoredSample& s : scored) {
      if (s.sample.question_id != qid) {
        throw ValidationError("best_pairs_for_question: samples from questions " + qid + " and " +
                              s.sample.question_id + " mixed");
      }
    }
  }

  constexpr PairKind kOrder[] = {PairKind::DCP, PairKind::DICP, PairKind::CICP};
  std::optional<PreferencePair> best[3];

  for (std::size_t i = 0; i < scored.size(); ++i) {
    for (std::size_t j = i + 1; j < scored.size(); ++j) {
      const PairKind kind = kind_for(scored[i].sample.correct, scored[j].sample.correct);
      if (!kinds.enabled(kind)) continue;
      PreferencePair cand = orient(scored[i], scored[j], kind);
      if (!(cand.margin > 0.0)) continue;
      auto& slot = best[static_cast<int>(kind)];
      if (!slot || better(cand, *slot)) {
        slot = std::move(cand);
      }
    }
  }

  std::vector<PreferencePair> out;
  for (PairKind kind : kOrder) {
    if (auto& slot = best[static_cast<int>(kind)]) {
      out.push_back(std::move(*slot));
    }
  }
  return out;
}

std::vector<PreferencePair> truncate_by_margin(std::span<const PreferencePair> pairs, double delta) {
  const std::size_t drop = removal_count(pairs.size(), delta);

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pairs[a].margin < pairs[b].margin;
  });

  std::vector<bool> removed(pairs.size(), false);
  for (std::size_t k = 0; k < drop; ++k) {
    removed[order[k]] = true;
  }

  std::vector<PreferencePair> out;
  out.reserve(pairs.size() - drop);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!removed[i]) out.push_back(pairs[i]);
  }
  return out;
}

std::vector<PreferencePair> truncate_by_margin_per_kind(std::span<const PreferencePair> pairs,
                                                        double delta) {
  removal_count(0, delta);  // range check even for empty input

  std::vector<bool> keep(pairs.size(), false);
  for (PairKind kind : {PairKind::DCP, PairKind::DICP, PairKind::CICP}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (pairs[i].kind == kind) idx.push_back(i);
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return pairs[a].margin < pairs[b].margin;
    });
    const std::size_t drop = removal_count(idx.size(), delta);
    for (std::size_t k = drop; k < idx.size(); ++k) {
      keep[idx[k]] = true;
    }
  }

  std::vector<PreferencePair> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (keep[i]) out.push_back(pairs[i]);
  }
  return out;
}

std::vector<PreferencePair> cap_per_question(std::span<const PreferencePair> pairs) {
  // (question, kind) -> index of the best pair seen so far; first wins ties.
  std::map<std::pair<std::string, PairKind>, std::size_t> best;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].kind == PairKind::CICP) continue;
    auto key = std::make_pair(pairs[i].question_id, pairs[i].kind);
    auto [it, inserted] = best.emplace(key, i);
    if (!inserted && pairs[i].margin > pairs[it->second].margin) {
      it->second = i;
    }
  }

  std::vector<bool> keep(pairs.size(), false);
  for (const auto& [key, idx] : best) {
    keep[idx] = true;
  }
  std::vector<PreferencePair> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (keep[i] || pairs[i].kind == PairKind::CICP) out.push_back(pairs[i]);
  }
  return out;
}

PairSummary summarize_pairs(std::span<const PreferencePair> pairs) {
  PairSummary s;
  s.total_pairs = pairs.size();
  for (const PreferencePair& p : pairs) {
    switch (p.kind) {
      case PairKind::DCP:
        ++s.dcp_count;
        break;
      case PairKind::DICP:
        ++s.dicp_count;
        break;
      case PairKind::CICP:
        ++s.cicp_count;
        break;
    }
  }
  if (s.total_pairs > 0) {
    const auto total = static_cast<double>(s.total_pairs);
    s.dcp_pct = 100.0 * static_cast<double>(s.dcp_count) / total;
    s.dicp_pct = 100.0 * static_cast<double>(s.dicp_count) / total;
  }
  return s;
}

PairDataset build_dataset(std::span<const std::vector<ScoredSample>> scored_by_question,
                          const BuildOptions& options) {
  if (!options.kinds.any()) {
    throw ValidationError("no pair kinds enabled");
  }
  removal_count(0, options.delta);

  PairDataset out;
  for (const auto& group : scored_by_question) {
    auto best = best_pairs_for_question(group, options.kinds);
    out.candidates.insert(out.candidates.end(), std::make_move_iterator(best.begin()),
                          std::make_move_iterator(best.end()));
  }

  auto survivors = options.truncate_per_kind
                       ? truncate_by_margin_per_kind(out.candidates, options.delta)
                       : truncate_by_margin(out.candidates, options.delta);
  out.pairs = cap_per_question(survivors);
  out.summary = summarize_pairs(out.pairs);
  return out;
}

}  // namespace dast
