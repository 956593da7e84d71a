#include "dast/simpo.hpp"

#include <algorithm>
#include <cmath>

#include "dast/error.hpp"
#include "dast/numeric.hpp"

namespace dast {

void validate(const SimPOConfig& cfg) {
  if (!(cfg.beta >= 0.0) || !std::isfinite(cfg.beta)) {
    throw ValidationError("beta must be a finite non-negative number");
  }
  if (!std::isfinite(cfg.gamma)) {
    throw ValidationError("gamma must be finite");
  }
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw ValidationError("learning_rate must be positive");
  }
  if (cfg.epochs < 1) {
    throw ValidationError("epochs must be at least 1");
  }
}

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double neg_log_sigmoid(double x) { return softplus(-x); }

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double simpo_margin(const TrainPair& tp, double beta, double gamma) {
  if (tp.winner_len <= 0 || tp.loser_len <= 0) {
    throw ValidationError("simpo_margin: response lengths must be positive (pair " +
                          tp.pair.winner + " / " + tp.pair.loser + ")");
  }
  return beta / static_cast<double>(tp.winner_len) * tp.winner_logprob_sum -
         beta / static_cast<double>(tp.loser_len) * tp.loser_logprob_sum - gamma;
}

double simpo_loss(std::span<const TrainPair> batch, const SimPOConfig& cfg) {
  if (batch.empty()) {
    throw ValidationError("simpo_loss: empty batch");
  }
  KahanSum total;
  for (const TrainPair& tp : batch) {
    total.add(neg_log_sigmoid(simpo_margin(tp, cfg.beta, cfg.gamma)));
  }
  return total.value() / static_cast<double>(batch.size());
}

}  // namespace dast
