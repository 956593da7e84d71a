#include "dast/cli.hpp"

#include <iostream>
#include <iterator>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dast/budget.hpp"
#include "dast/error.hpp"
#include "dast/io.hpp"
#include "dast/pipeline.hpp"

namespace dast::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;

// Optional JSON config shared by all subcommands. Flags given on the command
// line win over keys in the file, which win over built-in defaults.
struct ConfigFile {
  Json json = Json::object();

  template <class T>
  void apply(const char* key, T& target) const {
    if (auto it = json.find(key); it != json.end() && !it->is_null()) {
      try {
        target = it->get<T>();
      } catch (const Json::exception& e) {
        throw ValidationError(fmt::format("config key '{}': {}", key, e.what()));
      }
    }
  }
};

ConfigFile load_config(const std::string& path) {
  ConfigFile cfg;
  if (!path.empty()) {
    cfg.json = io::read_json_file(path);
    if (!cfg.json.is_object()) throw ValidationError(path + ": config must be a JSON object");
  }
  return cfg;
}

// Sets `target` from the config file unless the flag was given explicitly.
template <class T>
void merge(const ConfigFile& cfg, const CLI::Option* flag, const char* key, T& target) {
  if (flag->count() == 0) cfg.apply(key, target);
}

void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    io::write_file(path, text);
  }
}

template <class T>
std::string jsonl_text(std::span<const T> items) {
  std::ostringstream os;
  io::write_jsonl(os, items);
  return os.str();
}

struct Shared {
  std::string config_path;
};

// --- budget -----------------------------------------------------------------

struct BudgetArgs {
  std::string questions, samples, out, metadata, curve_out, curve_question;
  bool exclude_truncated = false;
  int curve_points = 41;
  CLI::Option* exclude_flag = nullptr;
};

int cmd_budget(const BudgetArgs& a, const Shared& shared, std::ostream& out, std::ostream& err) {
  const ConfigFile cfg = load_config(shared.config_path);
  TlbOptions opts;
  opts.exclude_truncated = a.exclude_truncated;
  merge(cfg, a.exclude_flag, "exclude_truncated", opts.exclude_truncated);

  const auto questions = io::read_questions(a.questions);
  const auto samples = io::read_samples(a.samples);
  const GroupedSamples grouped = group_samples(questions, samples);
  const auto reports = batch_tlb(grouped.groups, opts);

  write_or_print(a.out, jsonl_text<BudgetReport>(reports), out);
  if (!grouped.missing.empty()) {
    err << fmt::format("warning: {} question(s) without samples omitted (first: {})\n",
                       grouped.missing.size(), grouped.missing.front());
  }
  err << fmt::format("budget: {} report(s) from {} sample(s)\n", reports.size(), samples.size());

  if (!a.curve_out.empty()) {
    if (reports.empty()) throw ValidationError("no budgets to draw a reward curve from");
    const BudgetReport* chosen = &reports.front();
    if (!a.curve_question.empty()) {
      auto it = std::find_if(reports.begin(), reports.end(),
                             [&](const BudgetReport& r) { return r.question_id == a.curve_question; });
      if (it == reports.end()) throw ValidationError("no budget for question " + a.curve_question);
      chosen = &*it;
    }
    if (a.curve_points < 2) throw ValidationError("--curve-points must be at least 2");
    std::vector<TokenCount> grid;
    const double top = 2.0 * chosen->l_budget;
    for (int i = 0; i < a.curve_points; ++i) {
      grid.push_back(static_cast<TokenCount>(std::llround(top * i / (a.curve_points - 1))));
    }
    io::write_file(a.curve_out, reward_curve_csv(reward_curve(*chosen, grid)));
  }

  if (!a.metadata.empty()) {
    Json meta;
    meta["command"] = "budget";
    meta["questions"] = a.questions;
    meta["samples"] = a.samples;
    meta["exclude_truncated"] = opts.exclude_truncated;
    meta["omitted_questions"] = grouped.missing.size();
    io::write_file(a.metadata, meta.dump(2) + "\n");
  }
  return kExitOk;
}

// --- pairs ------------------------------------------------------------------

struct PairsArgs {
  std::string questions, samples, budgets, out, summary, candidates_out, metadata;
  double delta = 0.15;
  bool no_dcp = false, no_dicp = false, with_cicp = false, per_kind = false;
  bool exclude_truncated = false;
  CLI::Option *delta_opt = nullptr, *no_dcp_opt = nullptr, *no_dicp_opt = nullptr,
              *cicp_opt = nullptr, *per_kind_opt = nullptr, *exclude_opt = nullptr;
};

int cmd_pairs(const PairsArgs& a, const Shared& shared, std::ostream& out, std::ostream& err) {
  const ConfigFile cfg = load_config(shared.config_path);
  BuildOptions opts;
  opts.delta = a.delta;
  opts.kinds = {!a.no_dcp, !a.no_dicp, a.with_cicp};
  opts.truncate_per_kind = a.per_kind;
  merge(cfg, a.delta_opt, "delta", opts.delta);
  merge(cfg, a.no_dcp_opt, "use_dcp", opts.kinds.dcp);
  merge(cfg, a.no_dicp_opt, "use_dicp", opts.kinds.dicp);
  merge(cfg, a.cicp_opt, "use_cicp", opts.kinds.cicp);
  merge(cfg, a.per_kind_opt, "truncate_per_kind", opts.truncate_per_kind);
  TlbOptions tlb{a.exclude_truncated};
  merge(cfg, a.exclude_opt, "exclude_truncated", tlb.exclude_truncated);
  if (!opts.kinds.any()) throw ValidationError("no pair kinds enabled");

  const auto questions = io::read_questions(a.questions);
  const auto samples = io::read_samples(a.samples);
  const GroupedSamples grouped = group_samples(questions, samples);
  const auto reports = a.budgets.empty() ? batch_tlb(grouped.groups, tlb) : io::read_budgets(a.budgets);

  const auto scored = score_groups(grouped.groups, reports);
  const PairDataset ds = build_dataset(scored, opts);

  write_or_print(a.out, jsonl_text<PreferencePair>(ds.pairs), out);
  if (!a.summary.empty()) io::write_file(a.summary, io::to_json(ds.summary).dump(2) + "\n");
  if (!a.candidates_out.empty()) {
    io::write_jsonl<PreferencePair>(a.candidates_out, ds.candidates);
  }
  if (!grouped.missing.empty()) {
    err << fmt::format("warning: {} question(s) without samples omitted\n", grouped.missing.size());
  }
  err << fmt::format("pairs: {} candidates, {} kept | DCP % {:.2f}% | DICP % {:.2f}%", ds.candidates.size(),
                     ds.summary.total_pairs, ds.summary.dcp_pct, ds.summary.dicp_pct);
  if (opts.kinds.cicp) err << fmt::format(" | CICP {}", ds.summary.cicp_count);
  err << "\n";
  if (opts.delta == 0.0) err << "warning: " << kDeltaZeroWarning << "\n";

  if (!a.metadata.empty()) {
    Json meta;
    meta["command"] = "pairs";
    meta["delta"] = opts.delta;
    meta["use_dcp"] = opts.kinds.dcp;
    meta["use_dicp"] = opts.kinds.dicp;
    meta["use_cicp"] = opts.kinds.cicp;
    meta["truncate_per_kind"] = opts.truncate_per_kind;
    meta["exclude_truncated"] = tlb.exclude_truncated;
    meta["budgets"] = a.budgets.empty() ? Json(nullptr) : Json(a.budgets);
    io::write_file(a.metadata, meta.dump(2) + "\n");
  }
  return kExitOk;
}

// --- train-toy --------------------------------------------------------------

struct TrainArgs {
  std::string pairs, questions, samples, init_theta, out_dir;
  SimPOConfig simpo;
  bool grad_check = false;
  CLI::Option *beta_opt = nullptr, *gamma_opt = nullptr, *lr_opt = nullptr, *epochs_opt = nullptr;
};

int cmd_train_toy(const TrainArgs& a, const Shared& shared, std::ostream& out, std::ostream& err) {
  const ConfigFile cfg = load_config(shared.config_path);
  SimPOConfig simpo = a.simpo;
  if (auto it = cfg.json.find("simpo"); it != cfg.json.end()) {
    const SimPOConfig from_file = io::simpo_config_from_json(*it, simpo);
    if (a.beta_opt->count() == 0) simpo.beta = from_file.beta;
    if (a.gamma_opt->count() == 0) simpo.gamma = from_file.gamma;
    if (a.lr_opt->count() == 0) simpo.learning_rate = from_file.learning_rate;
    if (a.epochs_opt->count() == 0) simpo.epochs = from_file.epochs;
  }
  validate(simpo);

  const auto questions = io::read_questions(a.questions);
  const auto pairs = io::read_pairs(a.pairs);
  const auto binned = bin_pairs(pairs, questions);
  if (binned.empty()) throw ValidationError(a.pairs + ": no pairs to train on");
  const int bins = bin_count(questions);

  ToyPolicy initial;
  if (!a.init_theta.empty()) {
    initial = io::toy_policy_from_json(io::read_json_file(a.init_theta));
    if (initial.num_bins() < bins) {
      throw ValidationError(fmt::format("{}: theta has {} bins, questions need {}", a.init_theta,
                                        initial.num_bins(), bins));
    }
  } else if (!a.samples.empty()) {
    initial = policy_from_samples(questions, io::read_samples(a.samples), bins);
  } else {
    initial.theta.assign(static_cast<std::size_t>(bins), 0.0);
  }

  int code = kExitOk;
  Json meta;
  meta["command"] = "train-toy";
  meta["pairs"] = a.pairs;
  meta["questions"] = a.questions;
  meta["simpo"] = io::to_json(simpo);
  meta["bins"] = bins;
  meta["init"] = !a.init_theta.empty() ? "theta-file" : (!a.samples.empty() ? "sample-means" : "zeros");

  if (a.grad_check) {
    const double rel = grad_check(initial, binned, simpo);
    const bool ok = rel < 1e-5;
    out << fmt::format("grad-check: max relative error {:.3e} ({})\n", rel, ok ? "ok" : "FAILED");
    meta["grad_check_max_rel_error"] = rel;
    if (!ok) code = kExitCheckFailed;
  }

  const ToyTrainResult result = train_toy(initial, binned, simpo);
  const fs::path dir = a.out_dir;
  io::write_file(dir / "theta.json", io::to_json(result.policy).dump(2) + "\n");
  io::write_file(dir / "loss_trace.csv", loss_trace_csv(result.loss_trace));
  io::write_file(dir / "expected_length.csv", expected_length_csv(initial, result.policy));
  meta["final_loss"] = result.loss_trace.back();
  io::write_file(dir / "run_metadata.json", meta.dump(2) + "\n");

  err << fmt::format("train-toy: {} pairs, {} bins, loss {:.6f} -> {:.6f} (beta {}, gamma {})\n",
                     binned.size(), bins, result.loss_trace.front(), result.loss_trace.back(),
                     simpo.beta, simpo.gamma);
  return code;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string baseline, treated, out_json, out_csv;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const auto base = io::read_run(a.baseline);
  const auto treat = io::read_run(a.treated);
  const MetricsReport m = compare(base, treat);
  out << fmt::format("ACC {:.1f} | LEN {:.0f} -> {:.0f} | C-LEN {} | CR {} | C-CR {}\n", 100.0 * m.acc,
                     m.baseline.len, m.len, m.c_len ? fmt::format("{:.0f}", *m.c_len) : "-",
                     format_percent(m.cr), m.c_cr ? format_percent(*m.c_cr) : "-");

  const bool labelled = std::all_of(base.begin(), base.end(), [](const RunRecord& r) { return r.difficulty_label.has_value(); }) &&
                        std::all_of(treat.begin(), treat.end(), [](const RunRecord& r) { return r.difficulty_label.has_value(); });
  Json report = io::to_json(m);
  if (labelled) {
    const auto by_level = compare_by_level(base, treat);
    for (const auto& [level, lm] : by_level) {
      out << fmt::format("  level {}: LEN {:.0f} -> {:.0f} | CR {}\n", level, lm.baseline.len, lm.len,
                         format_percent(lm.cr));
    }
    Json levels = Json::object();
    for (const auto& [level, lm] : by_level) levels[std::to_string(level)] = io::to_json(lm);
    report["by_level"] = std::move(levels);
    if (!a.out_csv.empty()) io::write_file(a.out_csv, metrics_by_level_csv(by_level));
  } else if (!a.out_csv.empty()) {
    throw ValidationError("--out-csv needs difficulty_label on every record");
  }
  if (!a.out_json.empty()) io::write_file(a.out_json, report.dump(2) + "\n");
  return kExitOk;
}

// --- generate / demo --------------------------------------------------------

struct GenerateArgs {
  std::string model, out_dir;
  int questions_per_level = 100;
  int n = 20;
  std::uint64_t seed = 7;
  CLI::Option *qpl_opt = nullptr, *n_opt = nullptr, *seed_opt = nullptr;
};

DifficultyModel model_from(const ConfigFile& cfg, const std::string& model_path) {
  DifficultyModel model;
  if (auto it = cfg.json.find("model"); it != cfg.json.end()) {
    model = io::difficulty_model_from_json(*it, model);
  }
  if (!model_path.empty()) {
    model = io::difficulty_model_from_json(io::read_json_file(model_path), model);
  }
  return model;
}

int cmd_generate(const GenerateArgs& a, const Shared& shared, std::ostream& err) {
  const ConfigFile cfg = load_config(shared.config_path);
  GenerateArgs eff = a;
  merge(cfg, a.qpl_opt, "questions_per_level", eff.questions_per_level);
  merge(cfg, a.n_opt, "samples_per_question", eff.n);
  merge(cfg, a.seed_opt, "seed", eff.seed);
  const DifficultyModel model = model_from(cfg, a.model);

  const SynthDataset ds = generate(model, eff.questions_per_level, eff.n, eff.seed);
  const fs::path dir = a.out_dir;
  io::write_jsonl<Question>(dir / "questions.jsonl", ds.questions);
  io::write_jsonl<Sample>(dir / "samples.jsonl", ds.samples);
  io::write_file(dir / "tlb_by_level.csv", trend_csv(trend_report(ds)));
  Json meta;
  meta["command"] = "generate";
  meta["seed"] = eff.seed;
  meta["questions_per_level"] = eff.questions_per_level;
  meta["samples_per_question"] = eff.n;
  meta["model"] = io::to_json(model);
  io::write_file(dir / "run_metadata.json", meta.dump(2) + "\n");
  err << fmt::format("generate: {} questions, {} samples -> {}\n", ds.questions.size(),
                     ds.samples.size(), dir.string());
  return kExitOk;
}

struct DemoArgs {
  std::string model, out_dir;
  DemoConfig demo;
  bool no_dcp = false, no_dicp = false, with_cicp = false, per_kind = false;
  CLI::Option *seed_opt = nullptr, *qpl_opt = nullptr, *n_opt = nullptr, *delta_opt = nullptr,
              *no_dcp_opt = nullptr, *no_dicp_opt = nullptr, *cicp_opt = nullptr,
              *per_kind_opt = nullptr, *beta_opt = nullptr, *gamma_opt = nullptr, *lr_opt = nullptr,
              *epochs_opt = nullptr, *draws_opt = nullptr;
};

int cmd_demo(const DemoArgs& a, const Shared& shared, std::ostream& out, std::ostream& err) {
  const ConfigFile cfg = load_config(shared.config_path);
  DemoConfig c = a.demo;
  c.build.kinds = {!a.no_dcp, !a.no_dicp, a.with_cicp};
  c.build.truncate_per_kind = a.per_kind;
  merge(cfg, a.seed_opt, "seed", c.seed);
  merge(cfg, a.qpl_opt, "questions_per_level", c.questions_per_level);
  merge(cfg, a.n_opt, "samples_per_question", c.samples_per_question);
  merge(cfg, a.delta_opt, "delta", c.build.delta);
  merge(cfg, a.no_dcp_opt, "use_dcp", c.build.kinds.dcp);
  merge(cfg, a.no_dicp_opt, "use_dicp", c.build.kinds.dicp);
  merge(cfg, a.cicp_opt, "use_cicp", c.build.kinds.cicp);
  merge(cfg, a.per_kind_opt, "truncate_per_kind", c.build.truncate_per_kind);
  merge(cfg, a.draws_opt, "eval_draws_per_question", c.eval_draws_per_question);
  cfg.apply("exclude_truncated", c.tlb.exclude_truncated);
  if (auto it = cfg.json.find("simpo"); it != cfg.json.end()) {
    const SimPOConfig from_file = io::simpo_config_from_json(*it, c.simpo);
    if (a.beta_opt->count() == 0) c.simpo.beta = from_file.beta;
    if (a.gamma_opt->count() == 0) c.simpo.gamma = from_file.gamma;
    if (a.lr_opt->count() == 0) c.simpo.learning_rate = from_file.learning_rate;
    if (a.epochs_opt->count() == 0) c.simpo.epochs = from_file.epochs;
  }
  c.model = model_from(cfg, a.model);
  validate(c.simpo);

  const DemoResult r = run_demo(c);
  write_demo(r, c, a.out_dir);

  out << fmt::format("demo: {} questions, {} pairs (DCP % {:.2f}% | DICP % {:.2f}%), overall CR {}\n",
                     r.dataset.questions.size(), r.pairs.summary.total_pairs, r.pairs.summary.dcp_pct,
                     r.pairs.summary.dicp_pct, format_percent(r.overall.cr));
  out << fmt::format("  TLB strictly increasing with difficulty: {}\n",
                     r.checks.tlb_monotone ? "PASS" : "FAIL");
  out << fmt::format("  compression non-increasing with difficulty: {}\n",
                     r.checks.compression_non_increasing ? "PASS" : "FAIL");
  if (r.checks.degenerate_truncation) err << "warning: " << kDeltaZeroWarning << "\n";
  out << "  artifacts written to " << a.out_dir << "\n";
  return r.checks.tlb_monotone && r.checks.compression_non_increasing ? kExitOk : kExitCheckFailed;
}

// --- count ------------------------------------------------------------------

int cmd_count(const std::string& input, std::ostream& out, std::ostream& err) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (!input.empty() && input != "-") {
    file.open(input);
    if (!file) throw ValidationError("cannot open " + input);
    in = &file;
  }
  std::size_t words = 0;
  std::string word;
  while (*in >> word) ++words;
  err << "APPROXIMATE: whitespace-separated word count, not a model tokenizer count. "
         "For demo data only.\n";
  out << words << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Difficulty-adaptive token budgets and budget-preference pairs"};
  app.require_subcommand(1);
  Shared shared;
  app.add_option("--config", shared.config_path, "JSON config file (flags override its keys)");

  BudgetArgs budget;
  auto* sb = app.add_subcommand("budget", "Compute token length budgets per question");
  sb->add_option("--questions", budget.questions, "questions JSONL")->required();
  sb->add_option("--samples", budget.samples, "samples JSONL")->required();
  sb->add_option("--out", budget.out, "budgets JSONL (default stdout)");
  sb->add_option("--metadata", budget.metadata, "write effective config JSON here");
  budget.exclude_flag =
      sb->add_flag("--exclude-truncated", budget.exclude_truncated, "ignore samples with token_len == l_max");
  sb->add_option("--reward-curve", budget.curve_out, "write a reward curve CSV for one question");
  sb->add_option("--curve-question", budget.curve_question, "question for --reward-curve (default first)");
  sb->add_option("--curve-points", budget.curve_points, "grid points over [0, 2 * l_budget]");

  PairsArgs pairs;
  auto* sp = app.add_subcommand("pairs", "Build budget-preference pairs");
  sp->add_option("--questions", pairs.questions, "questions JSONL")->required();
  sp->add_option("--samples", pairs.samples, "samples JSONL")->required();
  sp->add_option("--budgets", pairs.budgets, "budgets JSONL (computed when omitted)");
  sp->add_option("--out", pairs.out, "pairs JSONL (default stdout)");
  sp->add_option("--summary", pairs.summary, "summary JSON");
  sp->add_option("--candidates-out", pairs.candidates_out, "pooled candidates before filtering");
  sp->add_option("--metadata", pairs.metadata, "write effective config JSON here");
  pairs.delta_opt = sp->add_option("--delta", pairs.delta, "truncation fraction in [0, 1)");
  pairs.no_dcp_opt = sp->add_flag("--no-dcp", pairs.no_dcp, "disable dual-correct pairs");
  pairs.no_dicp_opt = sp->add_flag("--no-dicp", pairs.no_dicp, "disable dual-incorrect pairs");
  pairs.cicp_opt = sp->add_flag("--with-cicp", pairs.with_cicp, "add correct/incorrect pairs");
  pairs.per_kind_opt = sp->add_flag("--truncate-per-kind", pairs.per_kind, "truncate each kind separately");
  pairs.exclude_opt = sp->add_flag("--exclude-truncated", pairs.exclude_truncated,
                                   "ignore samples with token_len == l_max when computing budgets");

  TrainArgs train;
  auto* st = app.add_subcommand("train-toy", "Train the toy length policy with SimPO");
  st->add_option("--pairs", train.pairs, "pairs JSONL")->required();
  st->add_option("--questions", train.questions, "questions JSONL")->required();
  st->add_option("--samples", train.samples, "initialise theta from mean sample length per bin");
  st->add_option("--init-theta", train.init_theta, "initial theta JSON");
  st->add_option("--out-dir", train.out_dir, "output directory")->required();
  train.beta_opt = st->add_option("--beta", train.simpo.beta, "SimPO beta");
  train.gamma_opt = st->add_option("--gamma", train.simpo.gamma, "SimPO gamma");
  train.lr_opt = st->add_option("--lr", train.simpo.learning_rate, "learning rate");
  train.epochs_opt = st->add_option("--epochs", train.simpo.epochs, "full-batch epochs");
  st->add_flag("--grad-check", train.grad_check, "compare analytic and finite-difference gradients");

  EvalArgs eval;
  auto* se = app.add_subcommand("eval", "Compare a baseline and a treated run");
  se->add_option("--baseline", eval.baseline, "baseline run JSONL")->required();
  se->add_option("--treated", eval.treated, "treated run JSONL")->required();
  se->add_option("--out-json", eval.out_json, "report JSON");
  se->add_option("--out-csv", eval.out_csv, "per-level CSV");

  GenerateArgs gen;
  auto* sg = app.add_subcommand("generate", "Generate a synthetic difficulty-stratified benchmark");
  sg->add_option("--model", gen.model, "difficulty model JSON");
  sg->add_option("--out-dir", gen.out_dir, "output directory")->required();
  gen.qpl_opt = sg->add_option("--questions-per-level", gen.questions_per_level);
  gen.n_opt = sg->add_option("--n", gen.n, "samples per question");
  gen.seed_opt = sg->add_option("--seed", gen.seed);

  DemoArgs demo;
  auto* sd = app.add_subcommand("demo", "Run generate -> budget -> pairs -> train-toy -> eval");
  sd->add_option("--model", demo.model, "difficulty model JSON");
  sd->add_option("--out-dir", demo.out_dir, "output directory")->required();
  demo.seed_opt = sd->add_option("--seed", demo.demo.seed);
  demo.qpl_opt = sd->add_option("--questions-per-level", demo.demo.questions_per_level);
  demo.n_opt = sd->add_option("--n", demo.demo.samples_per_question, "samples per question");
  demo.delta_opt = sd->add_option("--delta", demo.demo.build.delta, "truncation fraction in [0, 1)");
  demo.no_dcp_opt = sd->add_flag("--no-dcp", demo.no_dcp);
  demo.no_dicp_opt = sd->add_flag("--no-dicp", demo.no_dicp);
  demo.cicp_opt = sd->add_flag("--with-cicp", demo.with_cicp);
  demo.per_kind_opt = sd->add_flag("--truncate-per-kind", demo.per_kind);
  demo.beta_opt = sd->add_option("--beta", demo.demo.simpo.beta);
  demo.gamma_opt = sd->add_option("--gamma", demo.demo.simpo.gamma);
  demo.lr_opt = sd->add_option("--lr", demo.demo.simpo.learning_rate);
  demo.epochs_opt = sd->add_option("--epochs", demo.demo.simpo.epochs);
  demo.draws_opt = sd->add_option("--eval-draws", demo.demo.eval_draws_per_question,
                                  "simulated responses per question in the eval runs");

  std::string count_input;
  auto* sc = app.add_subcommand("count", "Approximate whitespace token count (demo data only)");
  sc->add_option("input", count_input, "text file (default stdin)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (*sb) return cmd_budget(budget, shared, out, err);
    if (*sp) return cmd_pairs(pairs, shared, out, err);
    if (*st) return cmd_train_toy(train, shared, out, err);
    if (*se) return cmd_eval(eval, out);
    if (*sg) return cmd_generate(gen, shared, err);
    if (*sd) return cmd_demo(demo, shared, out, err);
    if (*sc) return cmd_count(count_input, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitValidation;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace dast::cli
