#include "dorb/quantile_scaler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dorb {

namespace {

double sorted_quantile(const std::vector<double>& sorted, double level) {
  const double rank = level * static_cast<double>(sorted.size() - 1);
  const auto below = static_cast<std::size_t>(std::floor(rank));
  const double frac = rank - static_cast<double>(below);
  if (frac == 0.0 || below + 1 >= sorted.size()) return sorted[below];
  return sorted[below] + frac * (sorted[below + 1] - sorted[below]);
}

}  // namespace

double quantile(std::span<const double> values, double level) {
  if (values.empty()) throw std::invalid_argument("quantile: empty list");
  if (!(level >= 0.0 && level <= 1.0)) throw std::invalid_argument("quantile: level must lie in [0,1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted_quantile(sorted, level);
}

QuantileScaler::QuantileScaler(std::size_t capacity, double lo_level, double hi_level)
    : capacity_(capacity), lo_level_(lo_level), hi_level_(hi_level) {
  if (capacity < 2) throw std::invalid_argument("quantile scaler: window capacity must be at least 2");
  if (!(lo_level >= 0.0 && lo_level < hi_level && hi_level <= 1.0)) {
    throw std::invalid_argument("quantile scaler: need 0 <= lo_level < hi_level <= 1");
  }
}

void QuantileScaler::observe(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("quantile scaler: non-finite value");
  window_.push_back(value);
  while (window_.size() > capacity_) window_.pop_front();
}

double QuantileScaler::scale(double value) const {
  if (!std::isfinite(value)) throw std::invalid_argument("quantile scaler: non-finite value");
  if (window_.empty()) return 0.5;
  std::vector<double> sorted(window_.begin(), window_.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted_quantile(sorted, lo_level_);
  const double hi = sorted_quantile(sorted, hi_level_);
  if (value < lo) return 0.0;
  if (value > hi) return 1.0;
  if (hi == lo) return 0.5;
  return std::clamp((value - lo) / (hi - lo), 0.0, 1.0);
}

nlohmann::json QuantileScaler::snapshot() const {
  return {{"capacity", capacity_},
          {"lo_level", lo_level_},
          {"hi_level", hi_level_},
          {"window", std::vector<double>(window_.begin(), window_.end())}};
}

QuantileScaler QuantileScaler::restore(const nlohmann::json& snapshot) {
  QuantileScaler scaler(snapshot.at("capacity").get<std::size_t>(), snapshot.at("lo_level").get<double>(),
                        snapshot.at("hi_level").get<double>());
  for (double v : snapshot.at("window").get<std::vector<double>>()) scaler.observe(v);
  return scaler;
}

}  // namespace dorb
