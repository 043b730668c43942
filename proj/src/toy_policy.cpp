#include "dorb/toy_policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dorb {

ToyPolicy::ToyPolicy(std::size_t vocab_size, std::size_t max_len)
    : vocab_(vocab_size), max_len_(max_len), theta_(feature_dim() * max_len * vocab_size, 0.0) {
  if (vocab_size == 0 || max_len == 0) throw std::invalid_argument("toy policy: vocab and length must be positive");
}

std::size_t ToyPolicy::index(std::size_t feature, std::size_t position, Token token) const {
  return (feature * max_len_ + position) * vocab_ + static_cast<std::size_t>(token);
}

void ToyPolicy::check_input(std::span<const Token> input) const {
  if (input.size() > max_len_) throw std::invalid_argument("toy policy: input longer than max_len");
  for (Token t : input) {
    if (t < 0 || static_cast<std::size_t>(t) >= vocab_) throw std::invalid_argument("toy policy: token out of vocabulary");
  }
}

std::vector<std::size_t> ToyPolicy::active_features(std::span<const Token> input) const {
  std::vector<std::size_t> features;
  features.reserve(input.size() + 1);
  for (std::size_t i = 0; i < input.size(); ++i) features.push_back(i * vocab_ + static_cast<std::size_t>(input[i]));
  features.push_back(max_len_ * vocab_);
  return features;
}

std::vector<double> ToyPolicy::log_softmax(std::span<const Token> input) const {
  check_input(input);
  const auto features = active_features(input);
  const std::size_t len = input.size();
  std::vector<double> out(len * vocab_, 0.0);
  for (std::size_t p = 0; p < len; ++p) {
    double* row = out.data() + p * vocab_;
    for (std::size_t f : features) {
      const double* w = theta_.data() + index(f, p, 0);
      for (std::size_t v = 0; v < vocab_; ++v) row[v] += w[v];
    }
    const double top = *std::max_element(row, row + vocab_);
    double total = 0.0;
    for (std::size_t v = 0; v < vocab_; ++v) total += std::exp(row[v] - top);
    const double log_norm = top + std::log(total);
    for (std::size_t v = 0; v < vocab_; ++v) row[v] -= log_norm;
  }
  return out;
}

SampleResult ToyPolicy::sample(std::span<const Token> input, std::mt19937_64& rng) const {
  return sample_from(log_softmax(input), rng);
}

SampleResult ToyPolicy::sample_from(std::span<const double> log_probs, std::mt19937_64& rng) const {
  const std::size_t len = log_probs.size() / vocab_;
  SampleResult result;
  result.tokens.reserve(len);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t p = 0; p < len; ++p) {
    const double* row = log_probs.data() + p * vocab_;
    const double u = unit(rng);
    double cumulative = 0.0;
    std::size_t chosen = vocab_ - 1;
    for (std::size_t v = 0; v + 1 < vocab_; ++v) {
      cumulative += std::exp(row[v]);
      if (u < cumulative) {
        chosen = v;
        break;
      }
    }
    result.tokens.push_back(static_cast<Token>(chosen));
    result.log_prob += row[chosen];
  }
  return result;
}

TokenSeq ToyPolicy::greedy(std::span<const Token> input) const { return greedy_from(log_softmax(input)); }

TokenSeq ToyPolicy::greedy_from(std::span<const double> log_probs) const {
  const std::size_t len = log_probs.size() / vocab_;
  TokenSeq out;
  out.reserve(len);
  for (std::size_t p = 0; p < len; ++p) {
    const double* row = log_probs.data() + p * vocab_;
    out.push_back(static_cast<Token>(std::max_element(row, row + vocab_) - row));
  }
  return out;
}

double ToyPolicy::log_prob(std::span<const Token> input, std::span<const Token> output) const {
  if (output.size() != input.size()) throw std::invalid_argument("toy policy: output length must equal input length");
  const auto lsm = log_softmax(input);
  double total = 0.0;
  for (std::size_t p = 0; p < output.size(); ++p) total += lsm[p * vocab_ + static_cast<std::size_t>(output[p])];
  return total;
}

void ToyPolicy::accumulate_log_prob_gradient(std::span<const Token> input, std::span<const Token> output,
                                             double scale, std::span<double> grad) const {
  accumulate_gradient_from(input, log_softmax(input), output, scale, grad);
}

void ToyPolicy::accumulate_gradient_from(std::span<const Token> input, std::span<const double> log_probs,
                                         std::span<const Token> output, double scale, std::span<double> grad) const {
  if (grad.size() != theta_.size()) throw std::invalid_argument("toy policy: gradient buffer has wrong size");
  if (output.size() != input.size() || log_probs.size() != input.size() * vocab_) {
    throw std::invalid_argument("toy policy: output length must equal input length");
  }
  if (scale == 0.0) return;
  const auto features = active_features(input);
  // d log softmax(z)[w] / dz[v] = 1[v == w] - pi[v]
  std::vector<double> dz(vocab_);
  for (std::size_t p = 0; p < output.size(); ++p) {
    for (std::size_t v = 0; v < vocab_; ++v) dz[v] = -std::exp(log_probs[p * vocab_ + v]) * scale;
    dz[static_cast<std::size_t>(output[p])] += scale;
    for (std::size_t f : features) {
      double* g = grad.data() + index(f, p, 0);
      for (std::size_t v = 0; v < vocab_; ++v) g[v] += dz[v];
    }
  }
}

std::vector<double> reinforce_gradient(const ToyPolicy& policy, std::span<const ToyExample> batch,
                                       const RewardFn& reward, std::mt19937_64& rng, ReinforceStats* stats) {
  if (batch.empty()) throw std::invalid_argument("reinforce: empty batch");
  std::vector<double> grad(policy.theta().size(), 0.0);
  ReinforceStats local;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  for (const auto& example : batch) {
    const auto log_probs = policy.log_softmax(example.input);
    const auto sampled = policy.sample_from(log_probs, rng);
    const double r = reward(sampled.tokens, example);
    const double baseline = reward(policy.greedy_from(log_probs), example);
    const double advantage = r - baseline;
    local.mean_reward += r * inv_batch;
    local.mean_baseline += baseline * inv_batch;
    if (advantage == 0.0) {
      ++local.zero_advantage;
      continue;
    }
    policy.accumulate_gradient_from(example.input, log_probs, sampled.tokens, -advantage * inv_batch, grad);
  }
  if (stats != nullptr) *stats = local;
  return grad;
}

ReinforceStats reinforce_step(ToyPolicy& policy, std::span<const ToyExample> batch, const RewardFn& reward, double lr,
                              std::mt19937_64& rng) {
  if (!(lr > 0.0)) throw std::invalid_argument("reinforce: learning rate must be positive");
  ReinforceStats stats;
  const auto grad = reinforce_gradient(policy, batch, reward, rng, &stats);
  auto theta = policy.theta();
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= lr * grad[i];
  return stats;
}

}  // namespace dorb
