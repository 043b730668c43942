#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dorb/exp3.hpp"
#include "dorb/quantile_scaler.hpp"
#include "dorb/trainer.hpp"

namespace dorb {

enum class SchedulerKind { Single, Alternate, Random, SmBandit, HmBandit };

std::string_view to_string(SchedulerKind kind);
SchedulerKind parse_scheduler_kind(std::string_view name);

struct ScheduleConfig {
  std::size_t n_train = 2000;
  std::size_t n_bandit = 10;
  std::size_t n_controller = 30;
  double gamma = 0.15;
  std::size_t scaler_window = QuantileScaler::kDefaultCapacity;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument; n_controller is checked only for HM.
  void validate(SchedulerKind kind) const;
};

// Presets: question-generation-style (gamma 0.1, rounds 100/300) and
// data-to-text-style (gamma 0.15, rounds 10/30).
ScheduleConfig qg_profile();
ScheduleConfig webnlg_profile();

// One evaluation event. `arm` is the arm active after this event and
// `probabilities` the distribution it was drawn from (one-hot for
// deterministic schedulers, uniform for random choice).
struct RunRecord {
  std::size_t step = 0;
  std::optional<std::size_t> controller;  // HM only
  bool controller_decision = false;       // HM: controller block fired here
  std::size_t arm = 0;
  std::vector<double> probabilities;
  MetricVector raw;
  std::vector<double> scaled;
  std::optional<double> bandit_reward;  // bandit schedulers, after step 0
};

struct RunLog {
  SchedulerKind kind = SchedulerKind::Single;
  ScheduleConfig config;
  std::vector<std::string> metric_names;
  std::vector<RunRecord> records;
  std::size_t trainer_steps = 0;
  std::size_t evaluations = 0;
  // Bandit and scaler state at the end of the run.
  nlohmann::json final_state;

  const MetricVector& final_metrics() const { return records.back().raw; }
};

// Lowest index among the minima.
std::size_t argmin_lowest_index(std::span<const double> values);

RunLog run_single_reward(Trainer& trainer, std::size_t metric_index, const ScheduleConfig& config);
RunLog run_alternate(Trainer& trainer, const ScheduleConfig& config);
RunLog run_random(Trainer& trainer, const ScheduleConfig& config);
RunLog run_sm_bandit(Trainer& trainer, const ScheduleConfig& config);
RunLog run_hm_bandit(Trainer& trainer, const ScheduleConfig& config);

RunLog run_scheduler(SchedulerKind kind, Trainer& trainer, const ScheduleConfig& config, std::size_t metric_index = 0);

// Seed of HM child bandit `child` derived from the run seed.
std::uint64_t child_seed(std::uint64_t seed, std::size_t child);

}  // namespace dorb
