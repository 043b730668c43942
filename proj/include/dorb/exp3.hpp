#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <json.hpp>

namespace dorb {

struct ArmChoice {
  std::size_t arm = 0;
  double probability = 1.0;
};

// Exp3 arm-selection distribution evaluated from log-weights:
//   p_i = (1 - gamma) * w_i / sum_j w_j + gamma / K
// The log-weights may carry any common offset; the max is subtracted before
// exponentiating.
std::vector<double> exp3_probabilities(std::span<const double> log_weights, double gamma);

// Exp3 adversarial bandit over K arms.
//
// Weights are stored as natural logs and shifted so that the largest entry is
// zero after every update. The shift leaves the selection distribution
// unchanged and keeps long runs from overflowing.
//
// Not internally synchronized: one writer at a time.
class Exp3 {
 public:
  Exp3(std::size_t num_arms, double gamma, std::uint64_t seed);

  // Starts from explicit log-weights instead of the uniform initialisation.
  static Exp3 from_log_weights(std::vector<double> log_weights, double gamma, std::uint64_t seed);

  std::size_t num_arms() const { return log_weights_.size(); }
  double gamma() const { return gamma_; }
  std::uint64_t round() const { return round_; }
  std::span<const double> log_weights() const { return log_weights_; }

  std::vector<double> probabilities() const;

  // Inverse-CDF draw from probabilities(): the first arm whose cumulative
  // probability exceeds u in [0,1); the last arm absorbs rounding residue.
  ArmChoice choose();

  // Importance-weighted update of the chosen arm. The probability in the
  // importance weight is recomputed from the current weights.
  void update(std::size_t arm, double reward);

  nlohmann::json snapshot() const;
  static Exp3 restore(const nlohmann::json& snapshot);

 private:
  Exp3(std::vector<double> log_weights, double gamma, std::uint64_t seed, int);

  void normalize();

  double gamma_;
  std::vector<double> log_weights_;
  std::uint64_t round_ = 0;
  std::mt19937_64 rng_;
};

}  // namespace dorb
