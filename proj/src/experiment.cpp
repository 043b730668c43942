#include "dorb/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dorb/synthetic_trainer.hpp"
#include "dorb/toy_trainer.hpp"
#include "dorb/trace_io.hpp"

namespace dorb {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t trainer_seed(std::uint64_t seed) { return child_seed(seed, 0x7121); }

BuiltTrainer make_trainer(const ExperimentConfig& config, std::uint64_t seed) {
  BuiltTrainer built;
  if (config.env == Environment::Synthetic) {
    SyntheticConfig sc;
    sc.num_metrics = config.num_metrics;
    sc.gain = config.gain;
    sc.learn_rate = config.learn_rate;
    sc.noise_std = config.noise_std;
    sc.initial = config.initial;
    sc.seed = trainer_seed(seed);
    built.trainer = std::make_unique<SyntheticTrainer>(std::move(sc));
    return built;
  }
  ToyTrainerConfig tc = config.toy;
  tc.seed = trainer_seed(seed);
  auto toy = std::make_unique<ToyTrainer>(tc);
  const std::size_t steps = toy->warm_start();
  built.warm_start = {{"steps", steps}, {"metrics", toy->evaluate()}};
  built.trainer = std::move(toy);
  return built;
}

namespace {

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::vector<std::string> default_metric_names(const ExperimentConfig& config) {
  if (config.env == Environment::ToyTextgen) return {"rouge_l", "bleu", "coverage"};
  std::vector<std::string> names;
  for (std::size_t i = 0; i < config.num_metrics; ++i) names.push_back("m" + std::to_string(i));
  return names;
}

SeedOutcome run_one_seed(const ExperimentConfig& config, std::uint64_t seed) {
  SeedOutcome outcome;
  outcome.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  json summary = {{"seed", seed},
                  {"scheduler", std::string(to_string(config.scheduler))},
                  {"env", to_string(config.env)},
                  {"config", to_json(config)}};
  try {
    auto built = make_trainer(config, seed);
    ScheduleConfig schedule = config.schedule;
    schedule.seed = seed;
    const RunLog log = run_scheduler(config.scheduler, *built.trainer, schedule, config.metric);
    write_trace(config.out_dir / ("trace_" + std::to_string(seed) + ".csv"), log);

    outcome.final_metrics = log.final_metrics();
    double total = 0.0;
    for (double v : outcome.final_metrics) total += v;
    outcome.mean_of_metrics = total / static_cast<double>(outcome.final_metrics.size());
    outcome.min_of_metrics = *std::min_element(outcome.final_metrics.begin(), outcome.final_metrics.end());
    outcome.ok = true;

    summary["status"] = "ok";
    summary["metric_names"] = log.metric_names;
    summary["final_metrics"] = outcome.final_metrics;
    summary["mean_of_metrics"] = outcome.mean_of_metrics;
    summary["min_of_metrics"] = outcome.min_of_metrics;
    summary["trainer_steps"] = log.trainer_steps;
    summary["evaluations"] = log.evaluations;
    summary["final_state"] = log.final_state;
    if (!built.warm_start.empty()) summary["warm_start"] = built.warm_start;
  } catch (const std::exception& e) {
    outcome.ok = false;
    outcome.error = e.what();
    summary["status"] = "failed";
    summary["error"] = outcome.error;
  }
  outcome.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  summary["wall_time_s"] = outcome.wall_time_s;
  try {
    write_json(config.out_dir / ("summary_" + std::to_string(seed) + ".json"), summary);
  } catch (const std::exception& e) {
    outcome.ok = false;
    outcome.error = e.what();
  }
  return outcome;
}

json mean_std(const std::vector<double>& values) {
  if (values.empty()) return {{"mean", nullptr}, {"std", nullptr}};
  double total = 0.0;
  for (double v : values) total += v;
  const double mean = total / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  const double std = values.size() > 1 ? std::sqrt(sq / static_cast<double>(values.size() - 1)) : 0.0;
  return {{"mean", mean}, {"std", std}};
}

}  // namespace

json aggregate_outcomes(const ExperimentConfig& config, const std::vector<std::string>& metric_names,
                        const std::vector<SeedOutcome>& outcomes) {
  json seeds_ok = json::array(), seeds_failed = json::array();
  std::vector<std::vector<double>> per_metric(metric_names.size());
  std::vector<double> means, mins;
  for (const auto& o : outcomes) {
    if (!o.ok) {
      seeds_failed.push_back(o.seed);
      continue;
    }
    seeds_ok.push_back(o.seed);
    for (std::size_t m = 0; m < metric_names.size(); ++m) per_metric[m].push_back(o.final_metrics[m]);
    means.push_back(o.mean_of_metrics);
    mins.push_back(o.min_of_metrics);
  }
  json metrics = json::object();
  for (std::size_t m = 0; m < metric_names.size(); ++m) metrics[metric_names[m]] = mean_std(per_metric[m]);
  return {{"scheduler", std::string(to_string(config.scheduler))},
          {"env", to_string(config.env)},
          {"metric_names", metric_names},
          {"seeds_ok", seeds_ok},
          {"seeds_failed", seeds_failed},
          {"metrics", metrics},
          {"mean_of_metrics", mean_std(means)},
          {"min_of_metrics", mean_std(mins)}};
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec || !fs::is_directory(config.out_dir)) {
    throw std::runtime_error("cannot create output directory " + config.out_dir.string());
  }
  {
    const auto probe = config.out_dir / ".write_probe";
    std::ofstream out(probe);
    if (!out) throw std::runtime_error("output directory " + config.out_dir.string() + " is not writable");
    out.close();
    fs::remove(probe, ec);
  }

  if (config.env == Environment::ToyTextgen && config.dump_task) {
    const auto task = generate_reverse_task(config.toy.task);
    write_examples(config.out_dir / "task_train.txt", task.train);
    write_examples(config.out_dir / "task_validation.txt", task.validation);
  }

  ExperimentResult result;
  result.metric_names = default_metric_names(config);
  result.seeds.resize(config.seeds.size());

  const std::size_t workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  for (std::size_t begin = 0; begin < config.seeds.size(); begin += workers) {
    const std::size_t end = std::min(config.seeds.size(), begin + workers);
    std::vector<std::thread> pool;
    for (std::size_t i = begin; i < end; ++i) {
      pool.emplace_back([&, i] { result.seeds[i] = run_one_seed(config, config.seeds[i]); });
    }
    for (auto& t : pool) t.join();
  }

  result.aggregate = aggregate_outcomes(config, result.metric_names, result.seeds);
  write_json(config.out_dir / "aggregate.json", result.aggregate);
  return result;
}

namespace {

std::string fixed(double v, int digits = 4) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

std::string mean_pm_std(const json& entry) {
  if (entry.at("mean").is_null()) return "n/a";
  return fixed(entry.at("mean").get<double>()) + " ± " + fixed(entry.at("std").get<double>());
}

}  // namespace

ComparisonTable compare_runs(const std::vector<fs::path>& run_dirs) {
  if (run_dirs.size() < 2) throw ConfigError("compare needs at least two run directories");
  ComparisonTable table;
  std::vector<std::string> metric_names;
  for (const auto& dir : run_dirs) {
    if (!fs::is_directory(dir)) throw ConfigError("run directory not found: " + dir.string());
    const auto path = dir / "aggregate.json";
    std::ifstream in(path);
    if (!in) throw ConfigError("missing aggregate.json in " + dir.string());
    json agg;
    try {
      in >> agg;
    } catch (const json::parse_error& e) {
      throw ConfigError("malformed " + path.string() + ": " + e.what());
    }
    const auto names = agg.at("metric_names").get<std::vector<std::string>>();
    if (table.rows.empty()) {
      metric_names = names;
      table.header = {"scheduler", "env", "seeds"};
      for (const auto& n : names) table.header.push_back(n);
      table.header.push_back("mean_of_metrics");
      table.header.push_back("min_of_metrics");
    } else if (names != metric_names) {
      throw ConfigError("metric sets differ between run directories (" + dir.string() + ")");
    }
    std::vector<std::string> row{agg.at("scheduler").get<std::string>(), agg.at("env").get<std::string>(),
                                 std::to_string(agg.at("seeds_ok").size())};
    for (const auto& n : names) row.push_back(mean_pm_std(agg.at("metrics").at(n)));
    row.push_back(mean_pm_std(agg.at("mean_of_metrics")));
    row.push_back(mean_pm_std(agg.at("min_of_metrics")));
    table.rows.push_back(std::move(row));
    table.sources.push_back(dir);
  }
  return table;
}

std::string ComparisonTable::to_csv() const {
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
    out << '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return out.str();
}

std::string ComparisonTable::to_text() const {
  // Column widths count code points so the ± sign does not skew alignment.
  auto width = [](const std::string& s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
  };
  std::vector<std::size_t> widths(header.size(), 0);
  for (std::size_t i = 0; i < header.size(); ++i) widths[i] = width(header[i]);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], width(row[i]));
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      out << (i ? "  " : "") << fields[i];
      if (i + 1 < fields.size()) out << std::string(widths[i] - width(fields[i]), ' ');
    }
    out << '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  for (std::size_t i = 0; i < sources.size(); ++i) out << "# row " << i + 1 << ": " << sources[i].string() << '\n';
  return out.str();
}

}  // namespace dorb
