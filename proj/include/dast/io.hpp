#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dast/metrics.hpp"
#include "dast/pairs.hpp"
#include "dast/simpo.hpp"
#include "dast/synth.hpp"
#include "dast/toy_policy.hpp"
#include "dast/types.hpp"

namespace dast::io {

using Json = nlohmann::ordered_json;

// Field-level converters. Parsers throw ValidationError naming the offending
// field; the JSONL readers prefix the source and line number.
Json to_json(const Question& q);
Json to_json(const Sample& s);
Json to_json(const BudgetReport& r);
Json to_json(const PreferencePair& p);
Json to_json(const RunRecord& r);
Json to_json(const PairSummary& s);
Json to_json(const ToyPolicy& p);
Json to_json(const SimPOConfig& c);
Json to_json(const DifficultyModel& m);
Json to_json(const RunSummary& s);
Json to_json(const MetricsReport& m);

Question question_from_json(const Json& j);
Sample sample_from_json(const Json& j);
BudgetReport budget_from_json(const Json& j);
PreferencePair pair_from_json(const Json& j);
RunRecord run_record_from_json(const Json& j);
ToyPolicy toy_policy_from_json(const Json& j);

// Partial configs: only keys present in `j` override `base`.
SimPOConfig simpo_config_from_json(const Json& j, SimPOConfig base = {});
DifficultyModel difficulty_model_from_json(const Json& j, DifficultyModel base = {});

template <class T>
using Parser = T (*)(const Json&);

// One JSON object per non-blank line. Errors read "<source>:<line>: ...".
template <class T>
std::vector<T> read_jsonl(std::istream& in, const std::string& source, Parser<T> parse);

template <class T>
std::vector<T> read_jsonl(const std::filesystem::path& path, Parser<T> parse);

inline std::vector<Question> read_questions(const std::filesystem::path& p) {
  return read_jsonl<Question>(p, question_from_json);
}
inline std::vector<Sample> read_samples(const std::filesystem::path& p) {
  return read_jsonl<Sample>(p, sample_from_json);
}
inline std::vector<BudgetReport> read_budgets(const std::filesystem::path& p) {
  return read_jsonl<BudgetReport>(p, budget_from_json);
}
inline std::vector<PreferencePair> read_pairs(const std::filesystem::path& p) {
  return read_jsonl<PreferencePair>(p, pair_from_json);
}
inline std::vector<RunRecord> read_run(const std::filesystem::path& p) {
  return read_jsonl<RunRecord>(p, run_record_from_json);
}

Json read_json_file(const std::filesystem::path& path);

template <class T>
void write_jsonl(std::ostream& out, std::span<const T> items) {
  for (const T& item : items) {
    out << to_json(item).dump() << '\n';
  }
}

// Writes `text` to `path`, creating parent directories. Throws
// std::runtime_error on I/O failure.
void write_file(const std::filesystem::path& path, const std::string& text);

template <class T>
void write_jsonl(const std::filesystem::path& path, std::span<const T> items);

}  // namespace dast::io
