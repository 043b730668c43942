#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "dorb/toy_policy.hpp"
#include "dorb/trainer.hpp"

namespace dorb {

struct ToyTaskConfig {
  std::size_t vocab_size = 12;
  std::size_t length = 6;
  std::size_t num_train = 256;
  std::size_t num_validation = 64;
  std::uint64_t seed = 0;
};

struct ToyTask {
  std::vector<ToyExample> train;
  std::vector<ToyExample> validation;
};

// Reverse-copy task: reference = input reversed.
ToyTask generate_reverse_task(const ToyTaskConfig& config);

ToyExample make_example(TokenSeq input, TokenSeq reference);

// One example per line: space-separated input ids, a tab, space-separated
// reference ids.
void write_examples(const std::filesystem::path& path, const std::vector<ToyExample>& examples);
std::vector<ToyExample> read_examples(const std::filesystem::path& path);

// Metric order used by the toy trainer: rouge_l, bleu, coverage.
double score_metric(MetricKind kind, const TokenSeq& candidate, const ToyExample& example);

struct ToyTrainerConfig {
  ToyTaskConfig task;
  double lr = 10.0;
  std::size_t batch_size = 256;
  // Validation subsample for evaluate(); 0 means the full set.
  std::size_t eval_subsample = 0;
  // Cross-entropy warm start until validation ROUGE-L reaches the target.
  double warm_start_target = 0.4;
  double warm_start_lr = 0.5;
  std::size_t warm_start_max_steps = 5000;
  std::uint64_t seed = 0;
};

class ToyTrainer final : public Trainer {
 public:
  explicit ToyTrainer(const ToyTrainerConfig& config);
  ToyTrainer(const ToyTrainerConfig& config, ToyTask task);

  const std::vector<MetricId>& metric_ids() const override { return ids_; }
  void step(std::size_t metric_index) override;
  MetricVector evaluate() const override;

  // Per-position cross-entropy SGD on the training pairs; returns the number
  // of mini-batch steps taken (0 if the target already holds).
  std::size_t warm_start();

  const ToyPolicy& policy() const { return policy_; }
  ToyPolicy& policy() { return policy_; }
  const ToyTask& task() const { return task_; }
  const ReinforceStats& last_stats() const { return last_stats_; }

 private:
  std::vector<ToyExample> draw_batch();

  ToyTrainerConfig config_;
  ToyTask task_;
  ToyPolicy policy_;
  std::vector<MetricId> ids_;
  std::mt19937_64 rng_;
  ReinforceStats last_stats_;
};

}  // namespace dorb
