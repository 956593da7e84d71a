#include "dast/io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "dast/error.hpp"

namespace dast::io {

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object()) {
    throw ValidationError("expected a JSON object");
  }
  auto it = j.find(key);
  if (it == j.end()) {
    throw ValidationError(fmt::format("missing field '{}'", key));
  }
  return *it;
}

const Json* optional_field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return nullptr;
  return &*it;
}

std::string get_string(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_string()) throw ValidationError(fmt::format("field '{}' must be a string", key));
  return v.get<std::string>();
}

std::int64_t as_integer(const Json& v, const char* key) {
  if (!v.is_number_integer()) {
    throw ValidationError(fmt::format("field '{}' must be an integer", key));
  }
  return v.get<std::int64_t>();
}

std::int64_t get_integer(const Json& j, const char* key) { return as_integer(require(j, key), key); }

double as_number(const Json& v, const char* key) {
  if (!v.is_number()) throw ValidationError(fmt::format("field '{}' must be a number", key));
  return v.get<double>();
}

double get_number(const Json& j, const char* key) { return as_number(require(j, key), key); }

bool get_bool(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_boolean()) throw ValidationError(fmt::format("field '{}' must be a boolean", key));
  return v.get<bool>();
}

std::optional<int> get_label(const Json& j) {
  if (const Json* v = optional_field(j, "difficulty_label")) {
    return static_cast<int>(as_integer(*v, "difficulty_label"));
  }
  return std::nullopt;
}

void put_label(Json& j, const std::optional<int>& label) {
  if (label) j["difficulty_label"] = *label;
}

}  // namespace

Json to_json(const Question& q) {
  Json j;
  j["id"] = q.id;
  put_label(j, q.difficulty_label);
  j["l_max"] = q.l_max;
  return j;
}

Json to_json(const Sample& s) {
  Json j;
  j["question_id"] = s.question_id;
  j["sample_id"] = s.sample_id;
  j["token_len"] = s.token_len;
  j["correct"] = s.correct;
  if (s.logprob_sum) j["logprob_sum"] = *s.logprob_sum;
  return j;
}

Json to_json(const BudgetReport& r) {
  Json j;
  j["question_id"] = r.question_id;
  j["n"] = r.n;
  j["c"] = r.c;
  j["p"] = r.p;
  j["l_bar_r"] = r.l_bar_r;
  j["l_budget"] = r.l_budget;
  return j;
}

Json to_json(const PreferencePair& p) {
  Json j;
  j["question_id"] = p.question_id;
  j["winner"] = p.winner;
  j["loser"] = p.loser;
  j["kind"] = std::string(to_string(p.kind));
  j["margin"] = p.margin;
  j["winner_len"] = p.winner_len;
  j["loser_len"] = p.loser_len;
  return j;
}

Json to_json(const RunRecord& r) {
  Json j;
  j["question_id"] = r.question_id;
  j["correct"] = r.correct;
  j["token_len"] = r.token_len;
  put_label(j, r.difficulty_label);
  return j;
}

Json to_json(const PairSummary& s) {
  Json j;
  j["total_pairs"] = s.total_pairs;
  j["dcp_count"] = s.dcp_count;
  j["dicp_count"] = s.dicp_count;
  j["cicp_count"] = s.cicp_count;
  j["dcp_pct"] = s.dcp_pct;
  j["dicp_pct"] = s.dicp_pct;
  return j;
}

Json to_json(const ToyPolicy& p) {
  Json j;
  j["theta"] = p.theta;
  return j;
}

Json to_json(const SimPOConfig& c) {
  Json j;
  j["beta"] = c.beta;
  j["gamma"] = c.gamma;
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  return j;
}

Json to_json(const DifficultyModel& m) {
  Json j;
  Json levels = Json::array();
  for (const LevelParams& lv : m.levels) {
    Json l;
    l["accuracy"] = lv.accuracy;
    l["median_length"] = lv.median_length;
    levels.push_back(std::move(l));
  }
  j["levels"] = std::move(levels);
  j["sigma_len"] = m.sigma_len;
  j["incorrect_median_factor"] = m.incorrect_median_factor;
  j["l_max"] = m.l_max;
  return j;
}

Json to_json(const RunSummary& s) {
  Json j;
  j["count"] = s.count;
  j["acc"] = s.acc;
  j["len"] = s.len;
  j["c_len"] = s.c_len ? Json(*s.c_len) : Json(nullptr);
  return j;
}

Json to_json(const MetricsReport& m) {
  Json j;
  j["acc"] = m.acc;
  j["len"] = m.len;
  j["c_len"] = m.c_len ? Json(*m.c_len) : Json(nullptr);
  j["cr"] = m.cr;
  j["c_cr"] = m.c_cr ? Json(*m.c_cr) : Json(nullptr);
  j["baseline"] = to_json(m.baseline);
  j["treated"] = to_json(m.treated);
  return j;
}

Question question_from_json(const Json& j) {
  Question q;
  q.id = get_string(j, "id");
  q.difficulty_label = get_label(j);
  q.l_max = get_integer(j, "l_max");
  if (q.l_max <= 0) throw ValidationError("field 'l_max' must be positive");
  return q;
}

Sample sample_from_json(const Json& j) {
  Sample s;
  s.question_id = get_string(j, "question_id");
  s.sample_id = get_string(j, "sample_id");
  s.token_len = get_integer(j, "token_len");
  if (s.token_len < 0) throw ValidationError("field 'token_len' must be non-negative");
  s.correct = get_bool(j, "correct");
  if (const Json* v = optional_field(j, "logprob_sum")) {
    s.logprob_sum = as_number(*v, "logprob_sum");
    if (*s.logprob_sum > 0.0) throw ValidationError("field 'logprob_sum' must be <= 0");
  }
  return s;
}

BudgetReport budget_from_json(const Json& j) {
  BudgetReport r;
  r.question_id = get_string(j, "question_id");
  r.n = get_integer(j, "n");
  r.c = get_integer(j, "c");
  r.p = get_number(j, "p");
  r.l_bar_r = get_number(j, "l_bar_r");
  r.l_budget = get_number(j, "l_budget");
  if (r.n <= 0 || r.c < 0 || r.c > r.n) {
    throw ValidationError("budget counts must satisfy 0 <= c <= n, n > 0");
  }
  return r;
}

PreferencePair pair_from_json(const Json& j) {
  PreferencePair p;
  p.question_id = get_string(j, "question_id");
  p.winner = get_string(j, "winner");
  p.loser = get_string(j, "loser");
  const std::string kind = get_string(j, "kind");
  auto parsed = parse_pair_kind(kind);
  if (!parsed) throw ValidationError("field 'kind' must be DCP, DICP or CICP, got " + kind);
  p.kind = *parsed;
  p.margin = get_number(j, "margin");
  p.winner_len = get_integer(j, "winner_len");
  p.loser_len = get_integer(j, "loser_len");
  return p;
}

RunRecord run_record_from_json(const Json& j) {
  RunRecord r;
  r.question_id = get_string(j, "question_id");
  r.correct = get_bool(j, "correct");
  r.token_len = get_integer(j, "token_len");
  if (r.token_len < 0) throw ValidationError("field 'token_len' must be non-negative");
  r.difficulty_label = get_label(j);
  return r;
}

ToyPolicy toy_policy_from_json(const Json& j) {
  const Json& theta = require(j, "theta");
  if (!theta.is_array()) throw ValidationError("field 'theta' must be an array");
  ToyPolicy p;
  for (const Json& v : theta) {
    p.theta.push_back(as_number(v, "theta"));
  }
  return p;
}

SimPOConfig simpo_config_from_json(const Json& j, SimPOConfig base) {
  if (!j.is_object()) throw ValidationError("simpo config must be a JSON object");
  if (const Json* v = optional_field(j, "beta")) base.beta = as_number(*v, "beta");
  if (const Json* v = optional_field(j, "gamma")) base.gamma = as_number(*v, "gamma");
  if (const Json* v = optional_field(j, "learning_rate")) {
    base.learning_rate = as_number(*v, "learning_rate");
  }
  if (const Json* v = optional_field(j, "epochs")) {
    base.epochs = static_cast<int>(as_integer(*v, "epochs"));
  }
  return base;
}

DifficultyModel difficulty_model_from_json(const Json& j, DifficultyModel base) {
  if (!j.is_object()) throw ValidationError("difficulty model must be a JSON object");
  if (const Json* v = optional_field(j, "levels")) {
    if (!v->is_array()) throw ValidationError("field 'levels' must be an array");
    base.levels.clear();
    for (const Json& l : *v) {
      base.levels.push_back({get_number(l, "accuracy"), get_number(l, "median_length")});
    }
  }
  if (const Json* v = optional_field(j, "sigma_len")) base.sigma_len = as_number(*v, "sigma_len");
  if (const Json* v = optional_field(j, "incorrect_median_factor")) {
    base.incorrect_median_factor = as_number(*v, "incorrect_median_factor");
  }
  if (const Json* v = optional_field(j, "l_max")) base.l_max = as_integer(*v, "l_max");
  validate(base);
  return base;
}

template <class T>
std::vector<T> read_jsonl(std::istream& in, const std::string& source, Parser<T> parse) {
  std::vector<T> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse(Json::parse(line)));
    } catch (const Json::parse_error& e) {
      throw ValidationError(fmt::format("{}:{}: malformed JSON: {}", source, line_no, e.what()));
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("{}:{}: {}", source, line_no, e.what()));
    }
  }
  return out;
}

template <class T>
std::vector<T> read_jsonl(const std::filesystem::path& path, Parser<T> parse) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open " + path.string());
  }
  return read_jsonl<T>(in, path.string(), parse);
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError(fmt::format("{}: malformed JSON: {}", path.string(), e.what()));
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

template <class T>
void write_jsonl(const std::filesystem::path& path, std::span<const T> items) {
  std::ostringstream os;
  write_jsonl(os, items);
  write_file(path, os.str());
}

#define DAST_INSTANTIATE_JSONL(T)                                                           \
  template std::vector<T> read_jsonl<T>(std::istream&, const std::string&, Parser<T>);      \
  template std::vector<T> read_jsonl<T>(const std::filesystem::path&, Parser<T>);           \
  template void write_jsonl<T>(const std::filesystem::path&, std::span<const T>);

DAST_INSTANTIATE_JSONL(Question)
DAST_INSTANTIATE_JSONL(Sample)
DAST_INSTANTIATE_JSONL(BudgetReport)
DAST_INSTANTIATE_JSONL(PreferencePair)
DAST_INSTANTIATE_JSONL(RunRecord)

#undef DAST_INSTANTIATE_JSONL

}  // namespace dast::io
