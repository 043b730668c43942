#include "dorb/exp3.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dorb {

namespace {

constexpr double kRewardTolerance = 1e-9;

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("exp3: gamma must lie in [0,1], got " + std::to_string(gamma));
  }
}

}  // namespace

std::vector<double> exp3_probabilities(std::span<const double> log_weights, double gamma) {
  const std::size_t k = log_weights.size();
  std::vector<double> p(k);
  if (k == 0) return p;
  const double shift = *std::max_element(log_weights.begin(), log_weights.end());
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    p[i] = std::exp(log_weights[i] - shift);
    total += p[i];
  }
  const double floor = gamma / static_cast<double>(k);
  for (auto& v : p) v = (1.0 - gamma) * (v / total) + floor;
  return p;
}

Exp3::Exp3(std::size_t num_arms, double gamma, std::uint64_t seed)
    : gamma_(gamma), log_weights_(num_arms, 0.0), rng_(seed) {
  if (num_arms == 0) throw std::invalid_argument("exp3: need at least one arm");
  check_gamma(gamma);
}

Exp3::Exp3(std::vector<double> log_weights, double gamma, std::uint64_t seed, int)
    : gamma_(gamma), log_weights_(std::move(log_weights)), rng_(seed) {
  if (log_weights_.empty()) throw std::invalid_argument("exp3: need at least one arm");
  check_gamma(gamma);
  for (double w : log_weights_) {
    if (!std::isfinite(w)) throw std::invalid_argument("exp3: log-weights must be finite");
  }
}

Exp3 Exp3::from_log_weights(std::vector<double> log_weights, double gamma, std::uint64_t seed) {
  return Exp3(std::move(log_weights), gamma, seed, 0);
}

std::vector<double> Exp3::probabilities() const { return exp3_probabilities(log_weights_, gamma_); }

ArmChoice Exp3::choose() {
  const auto p = probabilities();
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
  double cumulative = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    cumulative += p[i];
    if (u < cumulative) return {i, p[i]};
  }
  return {p.size() - 1, p.back()};
}

void Exp3::update(std::size_t arm, double reward) {
  if (arm >= num_arms()) {
    throw std::out_of_range("exp3: arm " + std::to_string(arm) + " out of range for " +
                            std::to_string(num_arms()) + " arms");
  }
  if (!(reward >= -kRewardTolerance && reward <= 1.0 + kRewardTolerance)) {
    throw std::invalid_argument("exp3: reward must lie in [0,1], got " + std::to_string(reward));
  }
  const double p = probabilities()[arm];
  const double estimate = reward / p;
  log_weights_[arm] += gamma_ * estimate / static_cast<double>(num_arms());
  ++round_;
  normalize();
}

void Exp3::normalize() {
  const double shift = *std::max_element(log_weights_.begin(), log_weights_.end());
  for (auto& w : log_weights_) w -= shift;
}

nlohmann::json Exp3::snapshot() const {
  std::ostringstream rng_text;
  rng_text << rng_;
  return {{"gamma", gamma_}, {"log_weights", log_weights_}, {"round", round_}, {"rng", rng_text.str()}};
}

Exp3 Exp3::restore(const nlohmann::json& snapshot) {
  Exp3 state(snapshot.at("log_weights").get<std::vector<double>>(), snapshot.at("gamma").get<double>(), 0, 0);
  state.round_ = snapshot.at("round").get<std::uint64_t>();
  std::istringstream rng_text(snapshot.at("rng").get<std::string>());
  rng_text >> state.rng_;
  if (!rng_text) throw std::invalid_argument("exp3: malformed generator state in snapshot");
  return state;
}

}  // namespace dorb
