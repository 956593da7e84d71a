#include <doctest.h>

#include <cmath>

#include "dast/error.hpp"
#include "dast/toy_policy.hpp"
#include "test_helpers.hpp"

using namespace dast;
using dast::test::TestRng;

namespace {

BinnedPair binned(int bin, TokenCount w_len, TokenCount l_len, PairKind kind = PairKind::DCP) {
  return BinnedPair{PreferencePair{"q", "w", "l", kind, 0.5, w_len, l_len}, bin};
}

std::vector<BinnedPair> random_batch(TestRng& rng, int bins, int size) {
  std::vector<BinnedPair> batch;
  for (int i = 0; i < size; ++i) {
    batch.push_back(binned(static_cast<int>(rng.integer(1, bins)), rng.integer(1, 60), rng.integer(1, 60)));
  }
  return batch;
}

}  // namespace

TEST_CASE("toy_logprob values") {
  const ToyPolicy p{{0.0}};
  CHECK(toy_logprob(p, 1, 0) == doctest::Approx(-0.693147180559945).epsilon(1e-14));
  CHECK(toy_logprob(p, 1, 3) == doctest::Approx(-2.772588722239781).epsilon(1e-14));
  CHECK_THROWS_AS(toy_logprob(p, 0, 1), ValidationError);
  CHECK_THROWS_AS(toy_logprob(p, 2, 1), ValidationError);
  CHECK_THROWS_AS(toy_logprob(p, 1, -1), ValidationError);
}

TEST_CASE("toy policy is a normalized distribution with mean exp(theta)") {
  for (double theta : {-3.0, -0.5, 0.0, 1.0, 2.5}) {
    const ToyPolicy p{{theta}};
    const double s = p.continue_probability(1);
    CHECK(s > 0.0);
    CHECK(s < 1.0);
    double total = 0.0, mean = 0.0;
    TokenCount len = 0;
    // tail mass after len terms is s^len
    while (std::pow(s, static_cast<double>(len)) >= 1e-12) {
      const double pr = std::exp(toy_logprob(p, 1, len));
      total += pr;
      mean += static_cast<double>(len) * pr;
      ++len;
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
    CHECK(mean == doctest::Approx(s / (1 - s)).epsilon(1e-6));
    CHECK(p.expected_length(1) == doctest::Approx(s / (1 - s)).epsilon(1e-12));
  }
  const std::vector<double> lens = {10.0, 250.0};
  const ToyPolicy q = ToyPolicy::from_expected_lengths(lens);
  CHECK(q.expected_length(1) == doctest::Approx(10.0));
  CHECK(q.expected_length(2) == doctest::Approx(250.0));
}

TEST_CASE("toy_logprob_grad agrees with central differences") {
  for (double theta : {-2.0, 0.0, 0.7, 3.0}) {
    for (TokenCount len : {0, 1, 5, 40}) {
      ToyPolicy hi{{theta + 1e-6}}, lo{{theta - 1e-6}};
      const double fd = (toy_logprob(hi, 1, len) - toy_logprob(lo, 1, len)) / 2e-6;
      CHECK(toy_logprob_grad(ToyPolicy{{theta}}, 1, len) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("grad_check over 100 random configurations") {
  TestRng rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int bins = static_cast<int>(rng.integer(1, 5));
    ToyPolicy p;
    for (int b = 0; b < bins; ++b) p.theta.push_back(rng.uniform(-2, 2));
    const auto batch = random_batch(rng, bins, static_cast<int>(rng.integer(1, 30)));
    const SimPOConfig cfg{rng.uniform(0.1, 5.0), rng.uniform(-1, 2), 1.0, 1};
    worst = std::max(worst, grad_check(p, batch, cfg));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("gradient structure") {
  ToyPolicy p{{0.3, -0.4, 1.1}};
  const std::vector<BinnedPair> only_bin1 = {binned(1, 3, 9), binned(1, 12, 4)};
  const auto lg = toy_loss_and_grad(p, only_bin1, SimPOConfig{2.0, 1.0, 1.0, 1});
  CHECK(lg.grad[0] != 0.0);
  CHECK(lg.grad[1] == 0.0);
  CHECK(lg.grad[2] == 0.0);

  const auto flat = toy_loss_and_grad(p, only_bin1, SimPOConfig{0.0, 1.0, 1.0, 1});
  for (double g : flat.grad) CHECK(g == 0.0);
  CHECK(flat.loss == doctest::Approx(softplus(1.0)));

  // equal lengths: margin is -gamma and the gradient vanishes
  const std::vector<BinnedPair> same = {binned(2, 7, 7)};
  const auto eq = toy_loss_and_grad(p, same, SimPOConfig{2.0, 1.0, 1.0, 1});
  CHECK(eq.loss == doctest::Approx(softplus(1.0)).epsilon(1e-14));
  CHECK(eq.grad[1] == doctest::Approx(0.0));
  CHECK(grad_check(p, same, SimPOConfig{2.0, 1.0, 1.0, 1}) < 1e-5);
  CHECK(grad_check(p, only_bin1, SimPOConfig{0.0, 1.0, 1.0, 1}) == 0.0);
}

TEST_CASE("train_toy moves lengths in the preferred direction") {
  SimPOConfig cfg{2.0, 1.0, 5.0, 50};
  SUBCASE("shorter winners in bin 1") {
    ToyPolicy init = ToyPolicy::from_expected_lengths(std::vector<double>{300.0, 300.0});
    const std::vector<BinnedPair> batch = {binned(1, 200, 600), binned(1, 150, 400), binned(1, 300, 900)};
    const auto res = train_toy(init, batch, cfg);
    CHECK(res.policy.theta[0] < init.theta[0]);
    CHECK(res.policy.expected_length(1) < init.expected_length(1));
    CHECK(res.policy.theta[1] == init.theta[1]);
    REQUIRE(res.loss_trace.size() == 51);
    for (std::size_t i = 1; i < res.loss_trace.size(); ++i) CHECK(res.loss_trace[i] <= res.loss_trace[i - 1]);
  }
  SUBCASE("longer winners in bin 5") {
    ToyPolicy init = ToyPolicy::from_expected_lengths(std::vector<double>{5, 5, 5, 5, 3000});
    const std::vector<BinnedPair> batch = {binned(5, 3500, 1200, PairKind::DICP), binned(5, 3000, 800, PairKind::DICP)};
    const auto res = train_toy(init, batch, cfg);
    CHECK(res.policy.theta[4] > init.theta[4]);
  }
  SUBCASE("default epochs is one step") {
    ToyPolicy init{{0.0}};
    const std::vector<BinnedPair> batch = {binned(1, 2, 8)};
    const auto res = train_toy(init, batch, SimPOConfig{});
    CHECK(res.loss_trace.size() == 2);
  }
}

TEST_CASE("divergence monitor") {
  DivergenceMonitor m(10);
  m.observe(1.0);
  for (int i = 1; i <= 9; ++i) m.observe(1.0 + 0.1 * i);
  CHECK(m.rising() == 9);
  CHECK_THROWS_WITH_AS(m.observe(5.0), doctest::Contains("smaller learning_rate"), NumericError);

  DivergenceMonitor reset(3);
  reset.observe(1.0);
  reset.observe(2.0);
  reset.observe(3.0);
  reset.observe(3.0);  // flat breaks the run
  CHECK(reset.rising() == 0);
  reset.observe(4.0);
  reset.observe(5.0);
  CHECK_THROWS_AS(reset.observe(6.0), NumericError);

  DivergenceMonitor nan_guard;
  CHECK_THROWS_AS(nan_guard.observe(std::nan("")), NumericError);
}
