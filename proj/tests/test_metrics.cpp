#include <doctest.h>

#include "dast/error.hpp"
#include "dast/metrics.hpp"
#include "test_helpers.hpp"

using namespace dast;

namespace {

std::vector<RunRecord> uniform_run(TokenCount len, int count, std::optional<int> level = std::nullopt, bool correct = true) {
  std::vector<RunRecord> run;
  for (int i = 0; i < count; ++i) run.push_back({"q" + std::to_string(i), correct, len, level});
  return run;
}

}  // namespace

TEST_CASE("summarize") {
  const std::vector<RunRecord> two = {{"a", true, 100, {}}, {"b", false, 300, {}}};
  const auto s = summarize(two);
  CHECK(s.acc == 0.5);
  CHECK(s.len == 200.0);
  REQUIRE(s.c_len.has_value());
  CHECK(*s.c_len == 100.0);

  CHECK_FALSE(summarize(uniform_run(50, 3, {}, false)).c_len.has_value());

  const auto one = summarize(uniform_run(777, 1));
  CHECK(one.acc == 1.0);
  CHECK(one.len == 777.0);
  CHECK(*one.c_len == 777.0);

  CHECK_THROWS_AS(summarize(std::vector<RunRecord>{}), ValidationError);
}

TEST_CASE("summarize is permutation invariant") {
  dast::test::TestRng rng(8);
  std::vector<RunRecord> run;
  for (int i = 0; i < 200; ++i) run.push_back({"q", rng.coin(), rng.integer(0, 9000), {}});
  const auto s = summarize(run);
  std::reverse(run.begin(), run.end());
  const auto r = summarize(run);
  CHECK(s.acc == r.acc);
  CHECK(s.len == r.len);
  CHECK(s.c_len == r.c_len);
}

TEST_CASE("compare against published table values") {
  const auto m = compare(uniform_run(4039, 1), uniform_run(3309, 1));
  CHECK(m.cr == doctest::Approx(0.180737806387719733).epsilon(1e-14));
  CHECK(format_percent(m.cr) == "18.1%");

  const auto neg = compare(uniform_run(10603, 1), uniform_run(10804, 1));
  CHECK(neg.cr < 0.0);
  CHECK(format_percent(neg.cr) == "-1.9%");
}

TEST_CASE("compare edge cases") {
  const std::vector<RunRecord> run = {{"a", true, 100, {}}, {"b", false, 300, {}}, {"c", true, 50, {}}};
  const auto same = compare(run, run);
  CHECK(same.cr == 0.0);
  CHECK(same.c_cr == 0.0);

  const auto no_correct = compare(run, uniform_run(10, 2, {}, false));
  CHECK_FALSE(no_correct.c_cr.has_value());
  CHECK_FALSE(no_correct.c_len.has_value());

  CHECK_THROWS_AS(compare(uniform_run(0, 2), run), ValidationError);
}

TEST_CASE("compare_by_level") {
  // Easy level compressed 60%, hard level 40%.
  std::vector<RunRecord> base, treat;
  for (auto r : uniform_run(1000, 4, 1)) base.push_back(r);
  for (auto r : uniform_run(3000, 4, 2)) base.push_back(r);
  for (auto r : uniform_run(400, 4, 1)) treat.push_back(r);
  for (auto r : uniform_run(1800, 4, 2)) treat.push_back(r);

  const auto by = compare_by_level(base, treat);
  REQUIRE(by.size() == 2);
  CHECK(by.at(1).cr == doctest::Approx(0.6));
  CHECK(by.at(2).cr == doctest::Approx(0.4));
  CHECK(by.at(1).cr > by.at(2).cr);

  // overall len is the count-weighted mean of level lens
  const auto overall = compare(base, treat);
  CHECK(overall.len == doctest::Approx((4 * by.at(1).len + 4 * by.at(2).len) / 8));

  // partition: adding a level does not change the others
  auto base3 = base, treat3 = treat;
  for (auto r : uniform_run(9000, 2, 3)) base3.push_back(r);
  for (auto r : uniform_run(10, 2, 3)) treat3.push_back(r);
  const auto by3 = compare_by_level(base3, treat3);
  CHECK(by3.at(1).cr == by.at(1).cr);
  CHECK(by3.at(2).cr == by.at(2).cr);

  CHECK(compare_by_level(uniform_run(5, 2, 4), uniform_run(4, 2, 4)).size() == 1);

  auto unlabeled = base;
  unlabeled.push_back({"orphan", true, 5, std::nullopt});
  CHECK_THROWS_WITH_AS(compare_by_level(unlabeled, treat), doctest::Contains("orphan"), ValidationError);
  CHECK_THROWS_AS(compare_by_level(base, treat3), ValidationError);
  CHECK_THROWS_AS(compare_by_level(base3, treat), ValidationError);
}

TEST_CASE("format_percent") {
  CHECK(format_percent(0.0) == "0.0%");
  CHECK(format_percent(0.598) == "59.8%");
  CHECK(format_percent(-0.0189) == "-1.9%");
}
