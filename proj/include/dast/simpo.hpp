#pragma once

#include <span>

#include "dast/pairs.hpp"

namespace dast {

// Published DAST training values. The toy trainer does not use them as
// defaults because its log-probabilities are orders of magnitude smaller
// than an LLM's.
inline constexpr double kLargeScaleBeta = 200.0;
inline constexpr double kLargeScaleGamma = 1.0;

struct SimPOConfig {
  double beta = 2.0;
  double gamma = 1.0;
  double learning_rate = 1.0;
  int epochs = 1;
};

// Throws ValidationError unless beta >= 0, learning_rate > 0, epochs >= 1.
// beta == 0 is accepted so the degenerate constant-loss case can be probed.
void validate(const SimPOConfig& cfg);

struct TrainPair {
  PreferencePair pair;
  double winner_logprob_sum = 0.0;
  double loser_logprob_sum = 0.0;
  TokenCount winner_len = 0;
  TokenCount loser_len = 0;
};

// log(1 + exp(x)) without overflow or cancellation.
double softplus(double x);

// -log(sigmoid(x)) == softplus(-x).
double neg_log_sigmoid(double x);

double sigmoid(double x);

// (beta / |y_w|) log pi(y_w) - (beta / |y_l|) log pi(y_l) - gamma.
// Throws ValidationError when either length is zero or negative.
double simpo_margin(const TrainPair& tp, double beta, double gamma);

// Mean over the batch of -log sigmoid(margin). Throws on an empty batch.
double simpo_loss(std::span<const TrainPair> batch, const SimPOConfig& cfg);

}  // namespace dast
