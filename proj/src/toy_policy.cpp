#include "dast/toy_policy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dast/error.hpp"
#include "dast/numeric.hpp"

namespace dast {

namespace {

constexpr int kDivergencePatience = 10;
constexpr double kGradCheckFloor = 1e-4;

std::size_t bin_index(const ToyPolicy& policy, int bin) {
  if (bin < 1 || bin > policy.num_bins()) {
    throw ValidationError("toy policy has no bin " + std::to_string(bin) + " (bins 1.." +
                          std::to_string(policy.num_bins()) + ")");
  }
  return static_cast<std::size_t>(bin - 1);
}

}  // namespace

void DivergenceMonitor::observe(double loss) {
  if (!std::isfinite(loss)) {
    throw NumericError("toy training produced a non-finite loss; try a smaller learning_rate");
  }
  rising_ = (has_last_ && loss > last_) ? rising_ + 1 : 0;
  has_last_ = true;
  last_ = loss;
  if (rising_ >= patience_) {
    throw NumericError("toy training diverged: loss rose for " + std::to_string(patience_) +
                       " consecutive epochs; try a smaller learning_rate");
  }
}

double ToyPolicy::continue_probability(int bin) const {
  return sigmoid(theta[bin_index(*this, bin)]);
}

double ToyPolicy::expected_length(int bin) const { return std::exp(theta[bin_index(*this, bin)]); }

ToyPolicy ToyPolicy::from_expected_lengths(std::span<const double> lengths) {
  ToyPolicy policy;
  policy.theta.reserve(lengths.size());
  for (double m : lengths) {
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw ValidationError("expected length must be positive and finite");
    }
    policy.theta.push_back(std::log(m));
  }
  return policy;
}

double toy_logprob(const ToyPolicy& policy, int bin, TokenCount length) {
  const double theta = policy.theta[bin_index(policy, bin)];
  if (length < 0) {
    throw ValidationError("toy_logprob: negative length");
  }
  // log s = -softplus(-theta), log(1 - s) = -softplus(theta)
  return -static_cast<double>(length) * softplus(-theta) - softplus(theta);
}

double toy_logprob_grad(const ToyPolicy& policy, int bin, TokenCount length) {
  const double theta = policy.theta[bin_index(policy, bin)];
  if (length < 0) {
    throw ValidationError("toy_logprob_grad: negative length");
  }
  return static_cast<double>(length) * sigmoid(-theta) - sigmoid(theta);
}

TrainPair make_train_pair(const ToyPolicy& policy, const BinnedPair& bp) {
  TrainPair tp;
  tp.pair = bp.pair;
  tp.winner_len = bp.pair.winner_len;
  tp.loser_len = bp.pair.loser_len;
  tp.winner_logprob_sum = toy_logprob(policy, bp.bin, tp.winner_len);
  tp.loser_logprob_sum = toy_logprob(policy, bp.bin, tp.loser_len);
  return tp;
}

double toy_loss(const ToyPolicy& policy, std::span<const BinnedPair> batch, const SimPOConfig& cfg) {
  std::vector<TrainPair> pairs;
  pairs.reserve(batch.size());
  for (const BinnedPair& bp : batch) {
    pairs.push_back(make_train_pair(policy, bp));
  }
  return simpo_loss(pairs, cfg);
}

LossAndGrad toy_loss_and_grad(const ToyPolicy& policy, std::span<const BinnedPair> batch,
                              const SimPOConfig& cfg) {
  if (batch.empty()) {
    throw ValidationError("toy_loss_and_grad: empty batch");
  }
  KahanSum loss;
  std::vector<KahanSum> grad(policy.theta.size());
  for (const BinnedPair& bp : batch) {
    const TrainPair tp = make_train_pair(policy, bp);
    const double m = simpo_margin(tp, cfg.beta, cfg.gamma);
    loss.add(neg_log_sigmoid(m));

    // d(-log sigmoid(m))/dm = -sigmoid(-m)
    const double dloss_dm = -sigmoid(-m);
    const double dm_dtheta =
        cfg.beta / static_cast<double>(tp.winner_len) * toy_logprob_grad(policy, bp.bin, tp.winner_len) -
        cfg.beta / static_cast<double>(tp.loser_len) * toy_logprob_grad(policy, bp.bin, tp.loser_len);
    grad[bin_index(policy, bp.bin)].add(dloss_dm * dm_dtheta);
  }

  const auto n = static_cast<double>(batch.size());
  LossAndGrad out;
  out.loss = loss.value() / n;
  out.grad.reserve(grad.size());
  for (const KahanSum& g : grad) {
    out.grad.push_back(g.value() / n);
  }
  return out;
}

ToyTrainResult train_toy(const ToyPolicy& initial, std::span<const BinnedPair> batch,
                         const SimPOConfig& cfg) {
  validate(cfg);
  ToyTrainResult result{initial, {}};
  result.loss_trace.reserve(static_cast<std::size_t>(cfg.epochs) + 1);

  DivergenceMonitor monitor(kDivergencePatience);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const LossAndGrad lg = toy_loss_and_grad(result.policy, batch, cfg);
    monitor.observe(lg.loss);
    result.loss_trace.push_back(lg.loss);
    for (std::size_t k = 0; k < lg.grad.size(); ++k) {
      result.policy.theta[k] -= cfg.learning_rate * lg.grad[k];
    }
  }
  const double final_loss = toy_loss(result.policy, batch, cfg);
  monitor.observe(final_loss);
  result.loss_trace.push_back(final_loss);
  return result;
}

double grad_check(const ToyPolicy& policy, std::span<const BinnedPair> batch,
                  const SimPOConfig& cfg) {
  const LossAndGrad analytic = toy_loss_and_grad(policy, batch, cfg);
  double worst = 0.0;
  ToyPolicy probe = policy;
  for (std::size_t k = 0; k < policy.theta.size(); ++k) {
    const double saved = probe.theta[k];
    probe.theta[k] = saved + kGradCheckStep;
    const double up = toy_loss(probe, batch, cfg);
    probe.theta[k] = saved - kGradCheckStep;
    const double down = toy_loss(probe, batch, cfg);
    probe.theta[k] = saved;

    const double numeric = (up - down) / (2.0 * kGradCheckStep);
    const double a = analytic.grad[k];
    if (a == 0.0 && numeric == 0.0) continue;
    const double scale = std::max({std::abs(a), std::abs(numeric), kGradCheckFloor});
    worst = std::max(worst, std::abs(a - numeric) / scale);
  }
  return worst;
}

}  // namespace dast
