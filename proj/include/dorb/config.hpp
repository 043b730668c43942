#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dorb/schedulers.hpp"
#include "dorb/synthetic_trainer.hpp"
#include "dorb/toy_trainer.hpp"

namespace dorb {

// Invalid or inconsistent experiment configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Environment { Synthetic, ToyTextgen };

std::string to_string(Environment env);
Environment parse_environment(const std::string& name);

struct ExperimentConfig {
  SchedulerKind scheduler = SchedulerKind::SmBandit;
  Environment env = Environment::Synthetic;
  ScheduleConfig schedule = webnlg_profile();
  // Metric optimized by the single-reward scheduler.
  std::size_t metric = 0;
  std::size_t num_metrics = 3;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path out_dir = "runs";

  // synthetic environment
  std::vector<std::vector<double>> gain;
  double learn_rate = 0.05;
  double noise_std = 0.01;
  std::vector<double> initial;

  // toy text-generation environment
  ToyTrainerConfig toy;
  bool dump_task = false;
};

// Strict parse of a JSON object: unknown keys, wrong types and out-of-range
// values raise ConfigError naming the key. Missing keys take defaults;
// `scheduler`, `env` and a seed (`seed` or `seeds`) are required.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

// Cross-field checks (K consistency, metric index, seed list, schedule).
void validate(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace dorb
