#include <doctest.h>

#include <cmath>

#include "dast/error.hpp"
#include "dast/simpo.hpp"
#include "test_helpers.hpp"

using namespace dast;

namespace {

TrainPair train_pair(double w_lp, TokenCount w_len, double l_lp, TokenCount l_len) {
  TrainPair tp;
  tp.pair = PreferencePair{"q", "w", "l", PairKind::DCP, 0.5, w_len, l_len};
  tp.winner_logprob_sum = w_lp;
  tp.winner_len = w_len;
  tp.loser_logprob_sum = l_lp;
  tp.loser_len = l_len;
  return tp;
}

}  // namespace

TEST_CASE("simpo_margin") {
  CHECK(simpo_margin(train_pair(-10, 10, -20, 20), 200, 1) == -1.0);
  CHECK(simpo_margin(train_pair(-10, 10, -30, 10), 200, 1) == 399.0);
  CHECK(simpo_margin(train_pair(-7, 3, -100, 9), 0, 2.5) == -2.5);
  CHECK_THROWS_AS(simpo_margin(train_pair(-1, 0, -1, 1), 1, 1), ValidationError);
  CHECK_THROWS_AS(simpo_margin(train_pair(-1, 1, -1, 0), 1, 1), ValidationError);
}

TEST_CASE("simpo_loss reference values") {
  SimPOConfig cfg{200, 0, 1, 1};
  const std::vector<TrainPair> zero = {train_pair(-10, 10, -10, 10)};
  CHECK(simpo_loss(zero, cfg) == doctest::Approx(0.693147180559945309).epsilon(1e-15));

  cfg.gamma = 1;
  CHECK(simpo_loss(zero, cfg) == doctest::Approx(1.31326168751822283).epsilon(1e-15));

  const std::vector<TrainPair> big = {train_pair(-10, 10, -30, 10)};
  CHECK(simpo_loss(big, cfg) >= 0.0);
  CHECK(simpo_loss(big, cfg) < 1e-12);

  CHECK_THROWS_AS(simpo_loss(std::vector<TrainPair>{}, cfg), ValidationError);
}

TEST_CASE("softplus is stable in both tails") {
  CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
  CHECK(softplus(1000.0) == 1000.0);
  CHECK(softplus(-1000.0) == 0.0);
  CHECK(softplus(-40.0) == doctest::Approx(std::exp(-40.0)).epsilon(1e-12));
  CHECK(sigmoid(-1000.0) == 0.0);
  CHECK(sigmoid(1000.0) == 1.0);
  CHECK(sigmoid(0.0) == 0.5);
}

TEST_CASE("per-pair loss properties") {
  dast::test::TestRng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const double m = rng.uniform(-50, 50);
    const double d = rng.uniform(1e-3, 5);
    CHECK(neg_log_sigmoid(m) >= 0.0);
    CHECK(neg_log_sigmoid(m + d) < neg_log_sigmoid(m));
    // swap with gamma = 0: m -> -m, and the pair of losses is minimised at 0
    CHECK(neg_log_sigmoid(m) + neg_log_sigmoid(-m) >= 2.0 * softplus(0.0) - 1e-15);
  }
  CHECK(neg_log_sigmoid(0.0) + neg_log_sigmoid(-0.0) == 2.0 * softplus(0.0));

  // swapping winner and loser negates the margin when gamma = 0
  const TrainPair tp = train_pair(-12, 7, -40, 13);
  TrainPair swapped = train_pair(-40, 13, -12, 7);
  CHECK(simpo_margin(swapped, 3, 0) == doctest::Approx(-simpo_margin(tp, 3, 0)).epsilon(1e-15));
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(validate(SimPOConfig{}));
  CHECK_NOTHROW(validate(SimPOConfig{0.0, 1.0, 1.0, 1}));
  CHECK_THROWS_AS(validate(SimPOConfig{-1.0, 1.0, 1.0, 1}), ValidationError);
  CHECK_THROWS_AS(validate(SimPOConfig{1.0, 1.0, 0.0, 1}), ValidationError);
  CHECK_THROWS_AS(validate(SimPOConfig{1.0, 1.0, 1.0, 0}), ValidationError);
  CHECK(kLargeScaleBeta == 200.0);
  CHECK(kLargeScaleGamma == 1.0);
}
