#pragma once

#include <cstddef>
#include <deque>
#include <span>

#include <json.hpp>

namespace dorb {

// Linear-interpolation quantile at fractional rank level * (m - 1) of the
// ascending order statistics. Throws on an empty list or level outside [0,1].
double quantile(std::span<const double> values, double level);

// Maps raw metric values into [0,1] against the lo/hi quantiles of a bounded
// history window:
//   0                         if value < q_lo
//   1                         if value > q_hi
//   (value - q_lo)/(q_hi - q_lo) otherwise
// The window excludes the value being scaled; callers scale first and then
// observe. An empty window, or q_lo == q_hi with the value sitting on both,
// yields the neutral 0.5.
class QuantileScaler {
 public:
  static constexpr std::size_t kDefaultCapacity = 100;
  static constexpr double kDefaultLo = 0.2;
  static constexpr double kDefaultHi = 0.8;

  explicit QuantileScaler(std::size_t capacity = kDefaultCapacity, double lo_level = kDefaultLo,
                          double hi_level = kDefaultHi);

  void observe(double value);
  double scale(double value) const;

  const std::deque<double>& window() const { return window_; }
  std::size_t capacity() const { return capacity_; }
  double lo_level() const { return lo_level_; }
  double hi_level() const { return hi_level_; }

  nlohmann::json snapshot() const;
  static QuantileScaler restore(const nlohmann::json& snapshot);

 private:
  std::size_t capacity_;
  double lo_level_;
  double hi_level_;
  std::deque<double> window_;
};

}  // namespace dorb
