#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "dorb/metrics.hpp"

namespace dorb {

struct SampleResult {
  TokenSeq tokens;
  double log_prob = 0.0;
};

// Linear-softmax sequence policy. The input is encoded as one-hot features
// (position i, token x_i) plus a bias feature; output position p has logits
//   z[p][v] = sum over active features f of theta[f][p][v].
// Output length equals input length.
class ToyPolicy {
 public:
  ToyPolicy(std::size_t vocab_size, std::size_t max_len);

  std::size_t vocab_size() const { return vocab_; }
  std::size_t max_len() const { return max_len_; }
  std::size_t feature_dim() const { return max_len_ * vocab_ + 1; }

  std::span<double> theta() { return theta_; }
  std::span<const double> theta() const { return theta_; }
  std::size_t index(std::size_t feature, std::size_t position, Token token) const;

  // Row-major [position][token] log-softmax values for the given input.
  std::vector<double> log_softmax(std::span<const Token> input) const;

  SampleResult sample(std::span<const Token> input, std::mt19937_64& rng) const;
  // Argmax per position; ties go to the lowest token id.
  TokenSeq greedy(std::span<const Token> input) const;
  double log_prob(std::span<const Token> input, std::span<const Token> output) const;

  // grad += scale * d/dtheta log p(output | input).
  void accumulate_log_prob_gradient(std::span<const Token> input, std::span<const Token> output, double scale,
                                    std::span<double> grad) const;

  // Variants over a log_softmax() result computed once for the input.
  SampleResult sample_from(std::span<const double> log_probs, std::mt19937_64& rng) const;
  TokenSeq greedy_from(std::span<const double> log_probs) const;
  void accumulate_gradient_from(std::span<const Token> input, std::span<const double> log_probs,
                                std::span<const Token> output, double scale, std::span<double> grad) const;

 private:
  void check_input(std::span<const Token> input) const;
  std::vector<std::size_t> active_features(std::span<const Token> input) const;

  std::size_t vocab_;
  std::size_t max_len_;
  std::vector<double> theta_;
};

struct ToyExample {
  TokenSeq input;
  TokenSeq reference;
  // Distinct reference tokens; the coverage reward looks for these.
  TokenSeq keywords;
};

using RewardFn = std::function<double(const TokenSeq& candidate, const ToyExample& example)>;

struct ReinforceStats {
  double mean_reward = 0.0;
  double mean_baseline = 0.0;
  std::size_t zero_advantage = 0;
};

// Batch-mean gradient of the self-critical policy-gradient loss
//   -(r(w_s) - r(w_greedy)) * grad log p(w_s)
// with one sampled sequence per example.
std::vector<double> reinforce_gradient(const ToyPolicy& policy, std::span<const ToyExample> batch,
                                       const RewardFn& reward, std::mt19937_64& rng, ReinforceStats* stats = nullptr);

// One plain gradient-descent step on the loss above.
ReinforceStats reinforce_step(ToyPolicy& policy, std::span<const ToyExample> batch, const RewardFn& reward, double lr,
                              std::mt19937_64& rng);

}  // namespace dorb
