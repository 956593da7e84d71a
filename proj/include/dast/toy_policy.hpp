#pragma once

#include <span>
#include <vector>

#include "dast/simpo.hpp"

namespace dast {

// Geometric stop/continue policy with one logit per difficulty bin.
//
// Bin d (numbered from 1, matching difficulty labels) continues with
// probability s = sigmoid(theta[d - 1]) and stops with 1 - s, so a response
// of L tokens has log-probability L log s + log(1 - s) and the expected
// length is s / (1 - s) = exp(theta).
struct ToyPolicy {
  std::vector<double> theta;

  int num_bins() const { return static_cast<int>(theta.size()); }
  double continue_probability(int bin) const;
  double expected_length(int bin) const;

  // Policy whose per-bin expected lengths equal `lengths` (all > 0).
  static ToyPolicy from_expected_lengths(std::span<const double> lengths);
};

// Throws ValidationError for a bin outside [1, num_bins] or negative length.
double toy_logprob(const ToyPolicy& policy, int bin, TokenCount length);

// d toy_logprob / d theta[bin] = L (1 - s) - s.
double toy_logprob_grad(const ToyPolicy& policy, int bin, TokenCount length);

// A preference pair tagged with the difficulty bin of its question.
struct BinnedPair {
  PreferencePair pair;
  int bin = 1;
};

TrainPair make_train_pair(const ToyPolicy& policy, const BinnedPair& bp);

double toy_loss(const ToyPolicy& policy, std::span<const BinnedPair> batch, const SimPOConfig& cfg);

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad;  // one entry per bin
};

// Loss and its analytic gradient with respect to theta.
LossAndGrad toy_loss_and_grad(const ToyPolicy& policy, std::span<const BinnedPair> batch,
                              const SimPOConfig& cfg);

struct ToyTrainResult {
  ToyPolicy policy;
  // loss_trace[e] is the loss before update e; the last entry is the loss of
  // the returned policy. Size epochs + 1.
  std::vector<double> loss_trace;
};

// Tracks consecutive loss increases during training.
class DivergenceMonitor {
 public:
  explicit DivergenceMonitor(int patience = 10) : patience_(patience) {}

  // Records the next loss; throws NumericError once the loss has risen for
  // `patience` consecutive observations.
  void observe(double loss);
  int rising() const { return rising_; }

 private:
  int patience_;
  int rising_ = 0;
  bool has_last_ = false;
  double last_ = 0.0;
};

// Full-batch gradient descent, one step per epoch. Throws NumericError if the
// loss rises for 10 consecutive epochs.
ToyTrainResult train_toy(const ToyPolicy& initial, std::span<const BinnedPair> batch,
                         const SimPOConfig& cfg);

inline constexpr double kGradCheckStep = 1e-6;

// Largest discrepancy between analytic and central-difference gradients over
// all bins, as |a - f| / max(|a|, |f|, 1e-4). Components that are both zero
// contribute 0.
double grad_check(const ToyPolicy& policy, std::span<const BinnedPair> batch,
                  const SimPOConfig& cfg);

}  // namespace dast
