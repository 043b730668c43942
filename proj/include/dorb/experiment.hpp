#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "dorb/config.hpp"
#include "dorb/schedulers.hpp"

namespace dorb {

struct BuiltTrainer {
  std::unique_ptr<Trainer> trainer;
  // Toy environment only: cross-entropy warm-start record.
  nlohmann::json warm_start = nlohmann::json::object();
};

// Builds the environment for one seed; the toy trainer is warm-started here.
BuiltTrainer make_trainer(const ExperimentConfig& config, std::uint64_t seed);

// Trainer-side seed derived from the run seed, separate from the scheduler stream.
std::uint64_t trainer_seed(std::uint64_t seed);

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  MetricVector final_metrics;
  double mean_of_metrics = 0.0;
  double min_of_metrics = 0.0;
  double wall_time_s = 0.0;
};

struct ExperimentResult {
  std::vector<std::string> metric_names;
  std::vector<SeedOutcome> seeds;
  nlohmann::json aggregate;
};

// Runs every seed (concurrently, up to the hardware thread count) and writes
// trace_<seed>.csv, summary_<seed>.json and aggregate.json under out_dir.
// A failing seed is recorded in its summary without aborting the others.
// Throws std::runtime_error if out_dir cannot be written.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Per-metric mean and sample standard deviation over successful seeds.
nlohmann::json aggregate_outcomes(const ExperimentConfig& config, const std::vector<std::string>& metric_names,
                                  const std::vector<SeedOutcome>& outcomes);

struct ComparisonTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::filesystem::path> sources;

  std::string to_text() const;
  std::string to_csv() const;
};

// Reads aggregate.json from each run directory. Requires at least two
// directories with identical metric names.
ComparisonTable compare_runs(const std::vector<std::filesystem::path>& run_dirs);

}  // namespace dorb
