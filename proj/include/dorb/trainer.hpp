#pragma once

#include <cstddef>
#include <vector>

#include "dorb/metrics.hpp"

namespace dorb {

// Optimization target driven by a scheduler. step() optimizes the RL loss of
// one metric; evaluate() scores all K metrics on a fixed validation set and
// must not mutate parameters.
class Trainer {
 public:
  virtual ~Trainer() = default;

  virtual const std::vector<MetricId>& metric_ids() const = 0;
  virtual void step(std::size_t metric_index) = 0;
  virtual MetricVector evaluate() const = 0;

  std::size_t num_metrics() const { return metric_ids().size(); }
};

}  // namespace dorb
