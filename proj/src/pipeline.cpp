#include "dast/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "dast/error.hpp"
#include "dast/io.hpp"
#include "dast/rng.hpp"

namespace dast {

std::vector<std::vector<ScoredSample>> score_groups(std::span<const QuestionSamples> groups,
                                                    std::span<const BudgetReport> reports) {
  std::unordered_map<std::string, const BudgetReport*> by_id;
  for (const BudgetReport& r : reports) {
    by_id.emplace(r.question_id, &r);
  }
  std::vector<std::vector<ScoredSample>> out;
  out.reserve(groups.size());
  for (const QuestionSamples& g : groups) {
    auto it = by_id.find(g.question.id);
    if (it == by_id.end()) {
      throw ValidationError("no budget for question " + g.question.id);
    }
    out.push_back(calibrate_all(g.samples, *it->second));
  }
  return out;
}

std::vector<BinnedPair> bin_pairs(std::span<const PreferencePair> pairs,
                                  std::span<const Question> questions) {
  std::unordered_map<std::string, const Question*> by_id;
  for (const Question& q : questions) {
    by_id.emplace(q.id, &q);
  }
  std::vector<BinnedPair> out;
  out.reserve(pairs.size());
  for (const PreferencePair& p : pairs) {
    auto it = by_id.find(p.question_id);
    if (it == by_id.end()) {
      throw ValidationError("pair refers to unknown question " + p.question_id);
    }
    if (!it->second->difficulty_label) {
      throw ValidationError("question " + p.question_id + " has no difficulty_label");
    }
    out.push_back({p, *it->second->difficulty_label});
  }
  return out;
}

int bin_count(std::span<const Question> questions) {
  int bins = 1;
  for (const Question& q : questions) {
    if (q.difficulty_label) {
      if (*q.difficulty_label < 1) {
        throw ValidationError("question " + q.id + ": difficulty_label must be >= 1");
      }
      bins = std::max(bins, *q.difficulty_label);
    }
  }
  return bins;
}

ToyPolicy policy_from_samples(std::span<const Question> questions, std::span<const Sample> samples,
                              int bins) {
  std::unordered_map<std::string, int> label_of;
  for (const Question& q : questions) {
    if (q.difficulty_label) label_of.emplace(q.id, *q.difficulty_label);
  }
  std::vector<std::int64_t> sum(static_cast<std::size_t>(bins), 0);
  std::vector<std::int64_t> count(static_cast<std::size_t>(bins), 0);
  for (const Sample& s : samples) {
    auto it = label_of.find(s.question_id);
    if (it == label_of.end() || it->second < 1 || it->second > bins) continue;
    sum[static_cast<std::size_t>(it->second - 1)] += s.token_len;
    ++count[static_cast<std::size_t>(it->second - 1)];
  }
  std::vector<double> means;
  for (std::size_t b = 0; b < sum.size(); ++b) {
    const double m = count[b] > 0 ? static_cast<double>(sum[b]) / static_cast<double>(count[b]) : 1.0;
    means.push_back(std::max(m, 1.0));
  }
  return ToyPolicy::from_expected_lengths(means);
}

std::vector<RunRecord> simulate_run(const ToyPolicy& policy, std::span<const Question> questions,
                                    std::span<const BudgetReport> reports, int draws_per_question,
                                    std::uint64_t key) {
  if (draws_per_question < 1) {
    throw ValidationError("draws_per_question must be at least 1");
  }
  std::unordered_map<std::string, double> accuracy;
  for (const BudgetReport& r : reports) {
    accuracy.emplace(r.question_id, r.p);
  }

  const CounterRng root(key);
  std::vector<RunRecord> run;
  run.reserve(questions.size() * static_cast<std::size_t>(draws_per_question));
  for (std::size_t qi = 0; qi < questions.size(); ++qi) {
    const Question& q = questions[qi];
    if (!q.difficulty_label) {
      throw ValidationError("question " + q.id + " has no difficulty_label");
    }
    auto acc = accuracy.find(q.id);
    if (acc == accuracy.end()) {
      continue;  // no budget: question was dropped upstream
    }
    const int bin = *q.difficulty_label;
    const double log_s = std::log(policy.continue_probability(bin));
    CounterRng rng = root.child(qi);
    for (int d = 0; d < draws_per_question; ++d) {
      const bool correct = rng.uniform() < acc->second;
      // P(L >= k) = s^k
      const double raw = std::floor(std::log(rng.uniform_open0()) / log_s);
      const auto len = static_cast<TokenCount>(std::min(raw, static_cast<double>(q.l_max)));
      run.push_back({q.id, correct, len, q.difficulty_label});
    }
  }
  return run;
}

DemoResult run_demo(const DemoConfig& config) {
  DemoResult r;
  r.dataset = generate(config.model, config.questions_per_level, config.samples_per_question,
                       config.seed);
  const GroupedSamples grouped = group_samples(r.dataset.questions, r.dataset.samples);
  r.budgets = batch_tlb(grouped.groups, config.tlb);
  r.trend = trend_report(r.dataset);

  const auto scored = score_groups(grouped.groups, r.budgets);
  r.pairs = build_dataset(scored, config.build);

  const int bins = bin_count(r.dataset.questions);
  r.initial_policy = policy_from_samples(r.dataset.questions, r.dataset.samples, bins);
  const auto binned = bin_pairs(r.pairs.pairs, r.dataset.questions);
  if (binned.empty()) {
    throw ValidationError("demo produced no preference pairs");
  }
  r.training = train_toy(r.initial_policy, binned, config.simpo);

  const std::uint64_t eval_key = CounterRng(config.seed).child(0xE7A1ULL).key();
  r.baseline_run = simulate_run(r.initial_policy, r.dataset.questions, r.budgets,
                                config.eval_draws_per_question, eval_key);
  r.treated_run = simulate_run(r.training.policy, r.dataset.questions, r.budgets,
                               config.eval_draws_per_question, eval_key);
  r.overall = compare(r.baseline_run, r.treated_run);
  r.by_level = compare_by_level(r.baseline_run, r.treated_run);

  r.checks.tlb_monotone = true;
  for (std::size_t i = 1; i < r.trend.size(); ++i) {
    if (!(r.trend[i].mean_tlb > r.trend[i - 1].mean_tlb)) r.checks.tlb_monotone = false;
  }
  r.checks.compression_non_increasing = true;
  const MetricsReport* prev = nullptr;
  for (const auto& [level, m] : r.by_level) {
    if (prev && m.cr > prev->cr) r.checks.compression_non_increasing = false;
    prev = &m;
  }
  r.checks.degenerate_truncation = config.build.delta == 0.0;
  return r;
}

std::string trend_csv(std::span<const LevelTrend> rows) {
  std::string out = "level,questions,mean_accuracy,mean_length,mean_tlb\n";
  for (const LevelTrend& t : rows) {
    out += fmt::format("{},{},{:.4f},{:.2f},{:.2f}\n", t.level, t.questions, t.mean_accuracy,
                       t.mean_length, t.mean_tlb);
  }
  return out;
}

std::string loss_trace_csv(std::span<const double> trace) {
  std::string out = "epoch,loss\n";
  for (std::size_t e = 0; e < trace.size(); ++e) {
    out += fmt::format("{},{:.12f}\n", e, trace[e]);
  }
  return out;
}

std::string expected_length_csv(const ToyPolicy& before, const ToyPolicy& after) {
  std::string out = "bin,theta_before,theta_after,expected_len_before,expected_len_after,change\n";
  for (int b = 1; b <= before.num_bins(); ++b) {
    const double lb = before.expected_length(b);
    const double la = after.expected_length(b);
    out += fmt::format("{},{:.8f},{:.8f},{:.4f},{:.4f},{:.4f}\n", b, before.theta[b - 1],
                       after.theta[b - 1], lb, la, la / lb - 1.0);
  }
  return out;
}

std::string metrics_by_level_csv(const std::map<int, MetricsReport>& by_level) {
  auto opt = [](const std::optional<double>& v, const char* spec) {
    return v ? fmt::format(fmt::runtime(spec), *v) : std::string();
  };
  std::string out = "level,acc,len,c_len,cr,c_cr\n";
  for (const auto& [level, m] : by_level) {
    out += fmt::format("{},{:.4f},{:.2f},{},{:.4f},{}\n", level, m.acc, m.len, opt(m.c_len, "{:.2f}"),
                       m.cr, opt(m.c_cr, "{:.4f}"));
  }
  return out;
}

std::string reward_curve_csv(std::span<const RewardPoint> curve) {
  std::string out = "token_len,reward_correct,reward_incorrect\n";
  for (const RewardPoint& p : curve) {
    out += fmt::format("{},{},{}\n", p.token_len, p.reward_correct, p.reward_incorrect);
  }
  return out;
}

namespace {

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

std::string summary_markdown(const DemoResult& r, const DemoConfig& c) {
  std::ostringstream md;
  md << "# Budget-preference demo\n\n";
  md << fmt::format("seed {}, {} levels x {} questions x {} samples, delta {}, beta {}, gamma {}, "
                    "lr {}, epochs {}\n\n",
                    c.seed, c.model.levels.size(), c.questions_per_level, c.samples_per_question,
                    c.build.delta, c.simpo.beta, c.simpo.gamma, c.simpo.learning_rate,
                    c.simpo.epochs);

  md << "## Token length budget by level\n\n| level | accuracy | mean length | mean TLB |\n"
        "|---|---|---|---|\n";
  for (const LevelTrend& t : r.trend) {
    md << fmt::format("| {} | {:.3f} | {:.1f} | {:.1f} |\n", t.level, t.mean_accuracy,
                      t.mean_length, t.mean_tlb);
  }

  const PairSummary& s = r.pairs.summary;
  md << fmt::format("\n## Preference pairs\n\n{} candidates, {} kept: DCP {} ({:.2f}%), DICP {} "
                    "({:.2f}%), CICP {}\n",
                    r.pairs.candidates.size(), s.total_pairs, s.dcp_count, s.dcp_pct, s.dicp_count,
                    s.dicp_pct, s.cicp_count);

  md << fmt::format("\n## Toy SimPO training\n\nloss {:.6f} -> {:.6f}\n\n",
                    r.training.loss_trace.front(), r.training.loss_trace.back());
  md << "| bin | expected length before | after | change |\n|---|---|---|---|\n";
  for (int b = 1; b <= r.initial_policy.num_bins(); ++b) {
    const double lb = r.initial_policy.expected_length(b);
    const double la = r.training.policy.expected_length(b);
    md << fmt::format("| {} | {:.1f} | {:.1f} | {} |\n", b, lb, la, format_percent(la / lb - 1.0));
  }

  md << "\n## Compression by level\n\n| level | LEN before | LEN after | CR | C-CR |\n"
        "|---|---|---|---|---|\n";
  for (const auto& [level, m] : r.by_level) {
    md << fmt::format("| {} | {:.1f} | {:.1f} | {} | {} |\n", level, m.baseline.len, m.len,
                      format_percent(m.cr), m.c_cr ? format_percent(*m.c_cr) : "-");
  }
  md << fmt::format("\nOverall CR {}\n", format_percent(r.overall.cr));

  md << "\n## Trend checks\n\n";
  md << fmt::format("- TLB strictly increasing with difficulty: {}\n", pass_fail(r.checks.tlb_monotone));
  md << fmt::format("- Compression ratio non-increasing with difficulty: {}\n",
                    pass_fail(r.checks.compression_non_increasing));
  if (r.checks.degenerate_truncation) {
    md << "\n**Warning:** " << kDeltaZeroWarning << "\n";
  }
  return md.str();
}

io::Json metadata_json(const DemoConfig& c) {
  io::Json j;
  j["command"] = "demo";
  j["seed"] = c.seed;
  j["questions_per_level"] = c.questions_per_level;
  j["samples_per_question"] = c.samples_per_question;
  j["model"] = io::to_json(c.model);
  j["exclude_truncated"] = c.tlb.exclude_truncated;
  j["delta"] = c.build.delta;
  j["use_dcp"] = c.build.kinds.dcp;
  j["use_dicp"] = c.build.kinds.dicp;
  j["use_cicp"] = c.build.kinds.cicp;
  j["truncate_per_kind"] = c.build.truncate_per_kind;
  j["simpo"] = io::to_json(c.simpo);
  j["eval_draws_per_question"] = c.eval_draws_per_question;
  return j;
}

}  // namespace

void write_demo(const DemoResult& r, const DemoConfig& c, const std::filesystem::path& dir) {
  using io::write_file;
  using io::write_jsonl;
  write_jsonl<Question>(dir / "questions.jsonl", r.dataset.questions);
  write_jsonl<Sample>(dir / "samples.jsonl", r.dataset.samples);
  write_jsonl<BudgetReport>(dir / "budgets.jsonl", r.budgets);
  write_file(dir / "tlb_by_level.csv", trend_csv(r.trend));
  write_jsonl<PreferencePair>(dir / "pairs.jsonl", r.pairs.pairs);
  write_file(dir / "pairs_summary.json", io::to_json(r.pairs.summary).dump(2) + "\n");
  write_file(dir / "theta.json", io::to_json(r.training.policy).dump(2) + "\n");
  write_file(dir / "loss_trace.csv", loss_trace_csv(r.training.loss_trace));
  write_file(dir / "expected_length.csv", expected_length_csv(r.initial_policy, r.training.policy));
  write_jsonl<RunRecord>(dir / "baseline_run.jsonl", r.baseline_run);
  write_jsonl<RunRecord>(dir / "treated_run.jsonl", r.treated_run);
  write_file(dir / "metrics.json", io::to_json(r.overall).dump(2) + "\n");
  write_file(dir / "metrics_by_level.csv", metrics_by_level_csv(r.by_level));
  write_file(dir / "run_metadata.json", metadata_json(c).dump(2) + "\n");
  write_file(dir / "summary.md", summary_markdown(r, c));
}

}  // namespace dast
