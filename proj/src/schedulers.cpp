#include "dorb/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace dorb {

std::string_view to_string(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::Single:
      return "single";
    case SchedulerKind::Alternate:
      return "alternate";
    case SchedulerKind::Random:
      return "random";
    case SchedulerKind::SmBandit:
      return "sm";
    case SchedulerKind::HmBandit:
      return "hm";
  }
  return "unknown";
}

SchedulerKind parse_scheduler_kind(std::string_view name) {
  for (auto kind : {SchedulerKind::Single, SchedulerKind::Alternate, SchedulerKind::Random, SchedulerKind::SmBandit,
                    SchedulerKind::HmBandit}) {
    if (name == to_string(kind)) return kind;
  }
  throw std::invalid_argument("unknown scheduler '" + std::string(name) +
                              "' (expected single, alternate, random, sm or hm)");
}

void ScheduleConfig::validate(SchedulerKind kind) const {
  if (n_bandit < 1) throw std::invalid_argument("n_bandit must be at least 1");
  if (n_train < n_bandit && n_train != 0) throw std::invalid_argument("n_train must be at least n_bandit");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0,1]");
  if (scaler_window < 2) throw std::invalid_argument("scaler window must be at least 2");
  if (kind == SchedulerKind::HmBandit && n_controller < n_bandit) {
    throw std::invalid_argument("n_controller must be at least n_bandit");
  }
}

ScheduleConfig qg_profile() {
  ScheduleConfig config;
  config.gamma = 0.1;
  config.n_bandit = 100;
  config.n_controller = 300;
  return config;
}

ScheduleConfig webnlg_profile() {
  ScheduleConfig config;
  config.gamma = 0.15;
  config.n_bandit = 10;
  config.n_controller = 30;
  return config;
}

std::size_t argmin_lowest_index(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmin of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best;
}

std::uint64_t child_seed(std::uint64_t seed, std::size_t child) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(child) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

std::vector<double> one_hot(std::size_t k, std::size_t arm) {
  std::vector<double> p(k, 0.0);
  p[arm] = 1.0;
  return p;
}

// Arm-selection strategy plugged into the shared training loop.
class ArmPolicy {
 public:
  virtual ~ArmPolicy() = default;
  virtual void start(RunRecord& record) = 0;
  virtual void on_evaluation(bool bandit_round, bool controller_round, RunRecord& record) = 0;
  virtual std::size_t arm() const = 0;
  virtual nlohmann::json state() const { return nlohmann::json::object(); }
};

class FixedArm final : public ArmPolicy {
 public:
  FixedArm(std::size_t k, std::size_t arm) : k_(k), arm_(arm) {}
  void start(RunRecord& record) override { fill(record); }
  void on_evaluation(bool, bool, RunRecord& record) override { fill(record); }
  std::size_t arm() const override { return arm_; }

 private:
  void fill(RunRecord& record) const {
    record.arm = arm_;
    record.probabilities = one_hot(k_, arm_);
  }
  std::size_t k_;
  std::size_t arm_;
};

class RoundRobin final : public ArmPolicy {
 public:
  explicit RoundRobin(std::size_t k) : k_(k) {}
  void start(RunRecord& record) override { fill(record); }
  void on_evaluation(bool bandit_round, bool, RunRecord& record) override {
    if (bandit_round) {
      ++round_;
      arm_ = round_ % k_;
    }
    fill(record);
  }
  std::size_t arm() const override { return arm_; }

 private:
  void fill(RunRecord& record) const {
    record.arm = arm_;
    record.probabilities = one_hot(k_, arm_);
  }
  std::size_t k_;
  std::size_t round_ = 0;
  std::size_t arm_ = 0;
};

class UniformRandom final : public ArmPolicy {
 public:
  UniformRandom(std::size_t k, std::uint64_t seed) : k_(k), rng_(seed), pick_(0, k - 1) {}
  void start(RunRecord& record) override {
    arm_ = pick_(rng_);
    fill(record);
  }
  void on_evaluation(bool bandit_round, bool, RunRecord& record) override {
    if (bandit_round) arm_ = pick_(rng_);
    fill(record);
  }
  std::size_t arm() const override { return arm_; }

 private:
  void fill(RunRecord& record) const {
    record.arm = arm_;
    record.probabilities.assign(k_, 1.0 / static_cast<double>(k_));
  }
  std::size_t k_;
  std::mt19937_64 rng_;
  std::uniform_int_distribution<std::size_t> pick_;
  std::size_t arm_ = 0;
};

double mean(std::span<const double> values) {
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

class SingleBandit final : public ArmPolicy {
 public:
  SingleBandit(std::size_t k, double gamma, std::uint64_t seed) : bandit_(k, gamma, seed) {}
  void start(RunRecord& record) override {
    arm_ = bandit_.choose().arm;
    fill(record);
  }
  void on_evaluation(bool bandit_round, bool, RunRecord& record) override {
    if (bandit_round) {
      const double reward = mean(record.scaled);
      bandit_.update(arm_, reward);
      record.bandit_reward = reward;
      arm_ = bandit_.choose().arm;
    }
    fill(record);
  }
  std::size_t arm() const override { return arm_; }
  nlohmann::json state() const override { return {{"bandit", bandit_.snapshot()}}; }

 private:
  void fill(RunRecord& record) const {
    record.arm = arm_;
    record.probabilities = bandit_.probabilities();
  }
  Exp3 bandit_;
  std::size_t arm_ = 0;
};

class HierarchicalBandit final : public ArmPolicy {
 public:
  HierarchicalBandit(std::size_t k, double gamma, std::uint64_t seed) {
    for (std::size_t c = 0; c < k; ++c) children_.emplace_back(k, gamma, child_seed(seed, c));
  }
  void start(RunRecord& record) override {
    arm_ = children_[active_].choose().arm;
    fill(record);
  }
  void on_evaluation(bool bandit_round, bool controller_round, RunRecord& record) override {
    if (bandit_round) {
      const double reward = record.scaled[active_];
      children_[active_].update(arm_, reward);
      record.bandit_reward = reward;
      arm_ = children_[active_].choose().arm;
    }
    if (controller_round) {
      active_ = argmin_lowest_index(record.scaled);
      record.controller_decision = true;
      arm_ = children_[active_].choose().arm;
    }
    fill(record);
  }
  std::size_t arm() const override { return arm_; }
  nlohmann::json state() const override {
    nlohmann::json children = nlohmann::json::array();
    for (const auto& c : children_) children.push_back(c.snapshot());
    return {{"active_child", active_}, {"children", children}};
  }

 private:
  void fill(RunRecord& record) const {
    record.controller = active_;
    record.arm = arm_;
    record.probabilities = children_[active_].probabilities();
  }
  std::vector<Exp3> children_;
  std::size_t active_ = 0;
  std::size_t arm_ = 0;
};

RunLog drive(SchedulerKind kind, Trainer& trainer, const ScheduleConfig& config, ArmPolicy& policy) {
  const std::size_t k = trainer.num_metrics();
  std::vector<QuantileScaler> scalers(k, QuantileScaler(config.scaler_window));

  RunLog log;
  log.kind = kind;
  log.config = config;
  for (const auto& id : trainer.metric_ids()) log.metric_names.push_back(id.name);

  auto evaluate = [&](std::size_t step) {
    RunRecord record;
    record.step = step;
    record.raw = trainer.evaluate();
    ++log.evaluations;
    if (record.raw.size() != k) throw std::runtime_error("trainer returned a metric vector of the wrong length");
    for (std::size_t m = 0; m < k; ++m) {
      if (!std::isfinite(record.raw[m])) {
        throw std::runtime_error("trainer produced non-finite metric '" + log.metric_names[m] + "' at step " +
                                 std::to_string(step));
      }
    }
    record.scaled.resize(k);
    for (std::size_t m = 0; m < k; ++m) record.scaled[m] = scalers[m].scale(record.raw[m]);
    for (std::size_t m = 0; m < k; ++m) scalers[m].observe(record.raw[m]);
    return record;
  };

  auto initial = evaluate(0);
  policy.start(initial);
  log.records.push_back(std::move(initial));

  const bool hierarchical = kind == SchedulerKind::HmBandit;
  for (std::size_t step = 1; step <= config.n_train; ++step) {
    trainer.step(policy.arm());
    ++log.trainer_steps;
    const bool bandit_round = step % config.n_bandit == 0;
    const bool controller_round = hierarchical && step % config.n_controller == 0;
    if (!bandit_round && !controller_round) continue;
    // A coinciding bandit and controller round shares one evaluation.
    auto record = evaluate(step);
    policy.on_evaluation(bandit_round, controller_round, record);
    log.records.push_back(std::move(record));
  }

  nlohmann::json scaler_state = nlohmann::json::array();
  for (const auto& s : scalers) scaler_state.push_back(s.snapshot());
  log.final_state = policy.state();
  log.final_state["scalers"] = scaler_state;
  return log;
}

}  // namespace

RunLog run_single_reward(Trainer& trainer, std::size_t metric_index, const ScheduleConfig& config) {
  config.validate(SchedulerKind::Single);
  if (metric_index >= trainer.num_metrics()) throw std::out_of_range("single-reward metric index out of range");
  FixedArm policy(trainer.num_metrics(), metric_index);
  return drive(SchedulerKind::Single, trainer, config, policy);
}

RunLog run_alternate(Trainer& trainer, const ScheduleConfig& config) {
  config.validate(SchedulerKind::Alternate);
  RoundRobin policy(trainer.num_metrics());
  return drive(SchedulerKind::Alternate, trainer, config, policy);
}

RunLog run_random(Trainer& trainer, const ScheduleConfig& config) {
  config.validate(SchedulerKind::Random);
  UniformRandom policy(trainer.num_metrics(), config.seed);
  return drive(SchedulerKind::Random, trainer, config, policy);
}

RunLog run_sm_bandit(Trainer& trainer, const ScheduleConfig& config) {
  config.validate(SchedulerKind::SmBandit);
  SingleBandit policy(trainer.num_metrics(), config.gamma, config.seed);
  return drive(SchedulerKind::SmBandit, trainer, config, policy);
}

RunLog run_hm_bandit(Trainer& trainer, const ScheduleConfig& config) {
  config.validate(SchedulerKind::HmBandit);
  HierarchicalBandit policy(trainer.num_metrics(), config.gamma, config.seed);
  return drive(SchedulerKind::HmBandit, trainer, config, policy);
}

RunLog run_scheduler(SchedulerKind kind, Trainer& trainer, const ScheduleConfig& config, std::size_t metric_index) {
  switch (kind) {
    case SchedulerKind::Single:
      return run_single_reward(trainer, metric_index, config);
    case SchedulerKind::Alternate:
      return run_alternate(trainer, config);
    case SchedulerKind::Random:
      return run_random(trainer, config);
    case SchedulerKind::SmBandit:
      return run_sm_bandit(trainer, config);
    case SchedulerKind::HmBandit:
      return run_hm_bandit(trainer, config);
  }
  throw std::invalid_argument("unknown scheduler kind");
}

}  // namespace dorb
