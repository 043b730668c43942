#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dorb/trainer.hpp"

namespace dorb {

struct SyntheticConfig {
  std::size_t num_metrics = 3;
  // gain[a][j]: effect on metric j of stepping arm a. Empty means identity.
  std::vector<std::vector<double>> gain;
  double learn_rate = 0.05;
  double noise_std = 0.0;
  // Starting metric values; empty means all zero, a single entry broadcasts.
  std::vector<double> initial;
  std::uint64_t seed = 0;
};

// Desk-scale multi-metric simulator. Stepping arm a moves every metric j by
//   m_j <- clamp(m_j + eta * G[a][j] * (1 - m_j) + N(0, sigma), 0, 1).
class SyntheticTrainer final : public Trainer {
 public:
  explicit SyntheticTrainer(SyntheticConfig config);

  const std::vector<MetricId>& metric_ids() const override { return ids_; }
  void step(std::size_t metric_index) override;
  MetricVector evaluate() const override { return state_; }

  const std::vector<std::vector<double>>& gain() const { return gain_; }

 private:
  std::vector<MetricId> ids_;
  std::vector<std::vector<double>> gain_;
  double learn_rate_;
  double noise_std_;
  MetricVector state_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};
};

}  // namespace dorb
