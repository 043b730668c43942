#include "dorb/synthetic_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dorb {

SyntheticTrainer::SyntheticTrainer(SyntheticConfig config)
    : gain_(std::move(config.gain)),
      learn_rate_(config.learn_rate),
      noise_std_(config.noise_std),
      rng_(config.seed) {
  const std::size_t k = config.num_metrics;
  if (k == 0) throw std::invalid_argument("synthetic trainer: need at least one metric");
  if (!(learn_rate_ > 0.0)) throw std::invalid_argument("synthetic trainer: learn_rate must be positive");
  if (!(noise_std_ >= 0.0)) throw std::invalid_argument("synthetic trainer: noise_std must be nonnegative");

  if (gain_.empty()) {
    gain_.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) gain_[i][i] = 1.0;
  }
  if (gain_.size() != k) throw std::invalid_argument("synthetic trainer: gain matrix must have K rows");
  for (const auto& row : gain_) {
    if (row.size() != k) throw std::invalid_argument("synthetic trainer: gain matrix must be K x K");
    for (double g : row) {
      if (!std::isfinite(g)) throw std::invalid_argument("synthetic trainer: gain entries must be finite");
    }
  }

  if (config.initial.empty()) {
    state_.assign(k, 0.0);
  } else if (config.initial.size() == 1) {
    state_.assign(k, config.initial.front());
  } else if (config.initial.size() == k) {
    state_ = std::move(config.initial);
  } else {
    throw std::invalid_argument("synthetic trainer: initial metrics must have 1 or K entries");
  }
  for (double v : state_) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("synthetic trainer: initial metrics must lie in [0,1]");
  }

  for (std::size_t i = 0; i < k; ++i) ids_.push_back({"m" + std::to_string(i), i});
}

void SyntheticTrainer::step(std::size_t metric_index) {
  if (metric_index >= state_.size()) throw std::out_of_range("synthetic trainer: metric index out of range");
  const auto& row = gain_[metric_index];
  for (std::size_t j = 0; j < state_.size(); ++j) {
    double next = state_[j] + learn_rate_ * row[j] * (1.0 - state_[j]);
    if (noise_std_ > 0.0) next += noise_std_ * noise_(rng_);
    state_[j] = std::clamp(next, 0.0, 1.0);
  }
}

}  // namespace dorb
