#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "dast/cli.hpp"
#include "dast/io.hpp"

namespace fs = std::filesystem;
using namespace dast;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("dast_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& f) const { return path / f; }
};

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

void write_fixture(const TempDir& d) {
  write(d / "questions.jsonl",
        "{\"id\":\"a\",\"difficulty_label\":1,\"l_max\":4096}\n"
        "{\"id\":\"b\",\"difficulty_label\":2,\"l_max\":4096}\n");
  std::string samples;
  for (int i = 0; i < 20; ++i) {
    samples += "{\"question_id\":\"a\",\"sample_id\":\"a" + std::to_string(i) + "\",\"token_len\":800,\"correct\":true}\n";
  }
  samples +=
      "{\"question_id\":\"b\",\"sample_id\":\"b0\",\"token_len\":900,\"correct\":true}\n"
      "{\"question_id\":\"b\",\"sample_id\":\"b1\",\"token_len\":1100,\"correct\":true}\n"
      "{\"question_id\":\"b\",\"sample_id\":\"b2\",\"token_len\":3000,\"correct\":false}\n"
      "{\"question_id\":\"b\",\"sample_id\":\"b3\",\"token_len\":400,\"correct\":false}\n";
  write(d / "samples.jsonl", samples);
}

}  // namespace

TEST_CASE("cli budget") {
  TempDir d("budget");
  write_fixture(d);
  const auto r = run_cli({"budget", "--questions", (d / "questions.jsonl").string(), "--samples",
                          (d / "samples.jsonl").string(), "--out", (d / "budgets.jsonl").string(),
                          "--reward-curve", (d / "curve.csv").string(), "--curve-question", "b"});
  REQUIRE(r.code == 0);
  const auto budgets = io::read_budgets(d / "budgets.jsonl");
  REQUIRE(budgets.size() == 2);
  CHECK(budgets[0].l_budget == 800.0);
  CHECK(budgets[1].l_budget == 2548.0);

  const std::string curve = slurp(d / "curve.csv");
  CHECK(curve.rfind("token_len,reward_correct,reward_incorrect\n0,1,-1\n", 0) == 0);
  CHECK(line_count(curve) == 42);

  SUBCASE("malformed line") {
    write(d / "bad.jsonl", "{\"question_id\":\"a\",\"sample_id\":\"x\",\"token_len\":1,\"correct\":true}\n{oops\n");
    const auto bad = run_cli({"budget", "--questions", (d / "questions.jsonl").string(), "--samples",
                              (d / "bad.jsonl").string()});
    CHECK(bad.code == cli::kExitValidation);
    CHECK(bad.err.find("bad.jsonl:2") != std::string::npos);
  }
  SUBCASE("question without samples is omitted with a warning") {
    write(d / "q3.jsonl", slurp(d / "questions.jsonl") + "{\"id\":\"c\",\"l_max\":100}\n");
    const auto res = run_cli({"budget", "--questions", (d / "q3.jsonl").string(), "--samples",
                              (d / "samples.jsonl").string()});
    CHECK(res.code == 0);
    CHECK(line_count(res.out) == 2);
    CHECK(res.err.find("1 question(s) without samples omitted") != std::string::npos);
  }
  SUBCASE("missing required flag") { CHECK(run_cli({"budget"}).code == cli::kExitValidation); }
}

TEST_CASE("cli pairs") {
  TempDir d("pairs");
  REQUIRE(run_cli({"generate", "--out-dir", d.path.string(), "--questions-per-level", "30", "--seed", "3"}).code == 0);
  const std::string q = (d / "questions.jsonl").string();
  const std::string s = (d / "samples.jsonl").string();

  const auto r = run_cli({"pairs", "--questions", q, "--samples", s, "--out", (d / "pairs.jsonl").string(),
                          "--summary", (d / "summary.json").string(), "--candidates-out",
                          (d / "cand.jsonl").string()});
  REQUIRE(r.code == 0);
  CHECK(r.err.find("DCP % ") != std::string::npos);
  const auto summary = io::read_json_file(d / "summary.json");
  CHECK(summary["dcp_pct"].get<double>() + summary["dicp_pct"].get<double>() == doctest::Approx(100.0));
  CHECK(summary["total_pairs"].get<std::size_t>() == io::read_pairs(d / "pairs.jsonl").size());

  SUBCASE("no kinds") {
    const auto none = run_cli({"pairs", "--questions", q, "--samples", s, "--no-dcp", "--no-dicp"});
    CHECK(none.code == cli::kExitValidation);
    CHECK(none.err.find("no pair kinds enabled") != std::string::npos);
  }
  SUBCASE("delta 0 keeps a superset of delta 0.15") {
    REQUIRE(run_cli({"pairs", "--questions", q, "--samples", s, "--delta", "0", "--out",
                     (d / "p0.jsonl").string()})
                .code == 0);
    const auto p0 = io::read_pairs(d / "p0.jsonl");
    const auto p15 = io::read_pairs(d / "pairs.jsonl");
    CHECK(p0 == io::read_pairs(d / "cand.jsonl"));
    std::set<std::string> keys;
    for (const auto& p : p0) keys.insert(p.question_id + "|" + p.winner + "|" + p.loser);
    for (const auto& p : p15) CHECK(keys.contains(p.question_id + "|" + p.winner + "|" + p.loser));
    CHECK(p15.size() == p0.size() - static_cast<std::size_t>(std::floor(0.15 * static_cast<double>(p0.size()))));
  }
  SUBCASE("precomputed budgets give the same pairs") {
    REQUIRE(run_cli({"budget", "--questions", q, "--samples", s, "--out", (d / "b.jsonl").string()}).code == 0);
    REQUIRE(run_cli({"pairs", "--questions", q, "--samples", s, "--budgets", (d / "b.jsonl").string(), "--out",
                     (d / "pb.jsonl").string()})
                .code == 0);
    CHECK(slurp(d / "pb.jsonl") == slurp(d / "pairs.jsonl"));
  }
  SUBCASE("config file and flag precedence") {
    write(d / "cfg.json", R"({"delta": 0.3, "use_dicp": false})");
    REQUIRE(run_cli({"--config", (d / "cfg.json").string(), "pairs", "--questions", q, "--samples", s, "--metadata",
                     (d / "m1.json").string(), "--out", (d / "x.jsonl").string()})
                .code == 0);
    const auto m1 = io::read_json_file(d / "m1.json");
    CHECK(m1["delta"].get<double>() == 0.3);
    CHECK(m1["use_dicp"].get<bool>() == false);
    for (const auto& p : io::read_pairs(d / "x.jsonl")) CHECK(p.kind == PairKind::DCP);

    REQUIRE(run_cli({"--config", (d / "cfg.json").string(), "pairs", "--questions", q, "--samples", s, "--delta",
                     "0.1", "--metadata", (d / "m2.json").string(), "--out", (d / "x.jsonl").string()})
                .code == 0);
    CHECK(io::read_json_file(d / "m2.json")["delta"].get<double>() == 0.1);
  }
}

TEST_CASE("cli train-toy") {
  TempDir d("train");
  REQUIRE(run_cli({"generate", "--out-dir", d.path.string(), "--questions-per-level", "20"}).code == 0);
  const std::string q = (d / "questions.jsonl").string();
  REQUIRE(run_cli({"pairs", "--questions", q, "--samples", (d / "samples.jsonl").string(), "--out",
                   (d / "pairs.jsonl").string()})
              .code == 0);

  const auto r = run_cli({"train-toy", "--pairs", (d / "pairs.jsonl").string(), "--questions", q, "--samples",
                          (d / "samples.jsonl").string(), "--out-dir", (d / "out").string(), "--beta", "200",
                          "--gamma", "1", "--lr", "0.001", "--grad-check"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("grad-check: max relative error") != std::string::npos);
  const auto meta = io::read_json_file(d / "out" / "run_metadata.json");
  CHECK(meta["simpo"]["beta"].get<double>() == 200.0);
  CHECK(meta["simpo"]["gamma"].get<double>() == 1.0);
  CHECK(meta["simpo"]["epochs"].get<int>() == 1);

  const std::string trace = slurp(d / "out" / "loss_trace.csv");
  CHECK(trace.rfind("epoch,loss\n", 0) == 0);
  std::istringstream lines(trace);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) CHECK(std::stod(line.substr(line.find(',') + 1)) > 0.0);
  CHECK(line_count(slurp(d / "out" / "expected_length.csv")) == 6);
  CHECK(io::toy_policy_from_json(io::read_json_file(d / "out" / "theta.json")).theta.size() == 5);

  CHECK(run_cli({"train-toy", "--pairs", (d / "pairs.jsonl").string(), "--questions", q, "--out-dir",
                 (d / "bad").string(), "--lr", "-1"})
            .code == cli::kExitValidation);
}

TEST_CASE("cli eval") {
  TempDir d("eval");
  write(d / "base.jsonl", "{\"question_id\":\"x\",\"correct\":true,\"token_len\":4039,\"difficulty_label\":1}\n");
  write(d / "treat.jsonl", "{\"question_id\":\"x\",\"correct\":true,\"token_len\":3309,\"difficulty_label\":1}\n");
  const auto r = run_cli({"eval", "--baseline", (d / "base.jsonl").string(), "--treated", (d / "treat.jsonl").string(),
                          "--out-json", (d / "m.json").string(), "--out-csv", (d / "m.csv").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("CR 18.1%") != std::string::npos);
  CHECK(io::read_json_file(d / "m.json")["cr"].get<double>() == doctest::Approx(0.1807378));
  CHECK(slurp(d / "m.csv") == "level,acc,len,c_len,cr,c_cr\n1,1.0000,3309.00,3309.00,0.1807,0.1807\n");

  const auto same = run_cli({"eval", "--baseline", (d / "base.jsonl").string(), "--treated", (d / "base.jsonl").string()});
  CHECK(same.out.find("CR 0.0% | C-CR 0.0%") != std::string::npos);

  write(d / "multi.jsonl",
        "{\"question_id\":\"a\",\"correct\":true,\"token_len\":10,\"difficulty_label\":1}\n"
        "{\"question_id\":\"b\",\"correct\":false,\"token_len\":20,\"difficulty_label\":3}\n"
        "{\"question_id\":\"c\",\"correct\":true,\"token_len\":30,\"difficulty_label\":3}\n");
  REQUIRE(run_cli({"eval", "--baseline", (d / "multi.jsonl").string(), "--treated", (d / "multi.jsonl").string(),
                   "--out-csv", (d / "multi.csv").string()})
              .code == 0);
  CHECK(line_count(slurp(d / "multi.csv")) == 3);
}

TEST_CASE("cli demo and count") {
  TempDir d("demo");
  const auto r = run_cli({"demo", "--out-dir", (d / "a").string(), "--questions-per-level", "40", "--delta", "0"});
  CHECK(r.err.find("delta = 0") != std::string::npos);
  CHECK(slurp(d / "a" / "summary.md").find("**Warning:**") != std::string::npos);
  CHECK(fs::exists(d / "a" / "run_metadata.json"));

  write(d / "text.txt", "one two\nthree   four\tfive\n");
  const auto c = run_cli({"count", (d / "text.txt").string()});
  CHECK(c.code == 0);
  CHECK(c.out == "5\n");
  CHECK(c.err.find("APPROXIMATE") != std::string::npos);

  CHECK(run_cli({}).code == cli::kExitValidation);
  CHECK(run_cli({"frobnicate"}).code == cli::kExitValidation);
}
