#include "dorb/toy_trainer.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dorb {

namespace {

constexpr MetricKind kToyMetrics[] = {MetricKind::RougeL, MetricKind::Bleu, MetricKind::Coverage};

TokenSeq parse_tokens(const std::string& text) {
  TokenSeq out;
  std::istringstream in(text);
  std::string field;
  while (in >> field) {
    std::size_t used = 0;
    const long value = std::stol(field, &used);
    if (used != field.size() || value < 0) throw std::invalid_argument("task file: bad token '" + field + "'");
    out.push_back(static_cast<Token>(value));
  }
  return out;
}

}  // namespace

ToyExample make_example(TokenSeq input, TokenSeq reference) {
  ToyExample example{std::move(input), std::move(reference), {}};
  const std::set<Token> distinct(example.reference.begin(), example.reference.end());
  example.keywords.assign(distinct.begin(), distinct.end());
  return example;
}

ToyTask generate_reverse_task(const ToyTaskConfig& config) {
  if (config.vocab_size == 0 || config.length == 0) throw std::invalid_argument("toy task: empty vocabulary or length");
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<Token> token(0, static_cast<Token>(config.vocab_size - 1));
  auto make = [&](std::size_t count) {
    std::vector<ToyExample> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      TokenSeq input(config.length);
      for (auto& t : input) t = token(rng);
      TokenSeq reference(input.rbegin(), input.rend());
      out.push_back(make_example(std::move(input), std::move(reference)));
    }
    return out;
  };
  ToyTask task;
  task.train = make(config.num_train);
  task.validation = make(config.num_validation);
  return task;
}

void write_examples(const std::filesystem::path& path, const std::vector<ToyExample>& examples) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write task file " + path.string());
  auto join = [](const TokenSeq& seq) {
    std::string s;
    for (std::size_t i = 0; i < seq.size(); ++i) s += (i ? " " : "") + std::to_string(seq[i]);
    return s;
  };
  for (const auto& e : examples) out << join(e.input) << '\t' << join(e.reference) << '\n';
}

std::vector<ToyExample> read_examples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read task file " + path.string());
  std::vector<ToyExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::invalid_argument("task file line " + std::to_string(line_no) + ": missing tab separator");
    }
    out.push_back(make_example(parse_tokens(line.substr(0, tab)), parse_tokens(line.substr(tab + 1))));
  }
  return out;
}

double score_metric(MetricKind kind, const TokenSeq& candidate, const ToyExample& example) {
  switch (kind) {
    case MetricKind::RougeL:
      return rouge_l_f1(candidate, example.reference);
    case MetricKind::Bleu:
      return bleu(candidate, example.reference);
    case MetricKind::Coverage:
      return keyword_coverage(candidate, example.keywords);
    case MetricKind::Synthetic:
      break;
  }
  throw std::invalid_argument("toy trainer: unsupported metric kind");
}

ToyTrainer::ToyTrainer(const ToyTrainerConfig& config) : ToyTrainer(config, generate_reverse_task(config.task)) {}

ToyTrainer::ToyTrainer(const ToyTrainerConfig& config, ToyTask task)
    : config_(config),
      task_(std::move(task)),
      policy_(config.task.vocab_size, config.task.length),
      ids_{{"rouge_l", 0}, {"bleu", 1}, {"coverage", 2}},
      rng_(config.seed) {
  if (task_.train.empty() || task_.validation.empty()) throw std::invalid_argument("toy trainer: empty task split");
  if (config_.batch_size == 0) throw std::invalid_argument("toy trainer: batch size must be positive");
  if (!(config_.lr > 0.0)) throw std::invalid_argument("toy trainer: lr must be positive");
}

std::vector<ToyExample> ToyTrainer::draw_batch() {
  std::uniform_int_distribution<std::size_t> pick(0, task_.train.size() - 1);
  std::vector<ToyExample> batch;
  batch.reserve(config_.batch_size);
  for (std::size_t i = 0; i < config_.batch_size; ++i) batch.push_back(task_.train[pick(rng_)]);
  return batch;
}

void ToyTrainer::step(std::size_t metric_index) {
  if (metric_index >= ids_.size()) throw std::out_of_range("toy trainer: metric index out of range");
  const MetricKind kind = kToyMetrics[metric_index];
  const RewardFn reward = [kind](const TokenSeq& candidate, const ToyExample& example) {
    return score_metric(kind, candidate, example);
  };
  const auto batch = draw_batch();
  last_stats_ = reinforce_step(policy_, batch, reward, config_.lr, rng_);
}

MetricVector ToyTrainer::evaluate() const {
  const std::size_t count = config_.eval_subsample == 0 ? task_.validation.size()
                                                       : std::min(config_.eval_subsample, task_.validation.size());
  MetricVector totals(ids_.size(), 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& example = task_.validation[i];
    const auto decoded = policy_.greedy(example.input);
    for (std::size_t m = 0; m < ids_.size(); ++m) totals[m] += score_metric(kToyMetrics[m], decoded, example);
  }
  for (auto& v : totals) v /= static_cast<double>(count);
  return totals;
}

std::size_t ToyTrainer::warm_start() {
  std::size_t steps = 0;
  std::vector<double> grad(policy_.theta().size());
  while (evaluate()[0] < config_.warm_start_target) {
    if (steps == config_.warm_start_max_steps) {
      throw std::runtime_error("toy trainer: warm start did not reach the target ROUGE-L");
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    const auto batch = draw_batch();
    const double scale = 1.0 / static_cast<double>(batch.size());
    for (const auto& example : batch) {
      policy_.accumulate_log_prob_gradient(example.input, example.reference, scale, grad);
    }
    auto theta = policy_.theta();
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += config_.warm_start_lr * grad[i];
    ++steps;
  }
  return steps;
}

}  // namespace dorb
