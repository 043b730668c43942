// Command-line entry point: run experiments, compare finished runs, and a
// quick self-test of the core invariants.
//
// Exit codes: 0 success, 1 configuration/usage error, 2 runtime failure.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dorb/config.hpp"
#include "dorb/exp3.hpp"
#include "dorb/experiment.hpp"
#include "dorb/metrics.hpp"
#include "dorb/quantile_scaler.hpp"
#include "dorb/schedulers.hpp"
#include "dorb/synthetic_trainer.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct RunFlags {
  std::string config_path;
  std::optional<std::string> scheduler;
  std::optional<std::string> env;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> seeds;
  std::optional<std::string> out_dir;
  std::optional<double> gamma;
  std::optional<std::size_t> n_train;
  std::optional<std::size_t> n_bandit;
  std::optional<std::size_t> n_controller;
  std::optional<std::size_t> window;
  std::optional<std::size_t> metric;
  std::optional<std::size_t> k;
};

nlohmann::json build_config_doc(const RunFlags& f) {
  nlohmann::json doc = nlohmann::json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw dorb::ConfigError("cannot read config file " + f.config_path);
    try {
      in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
      throw dorb::ConfigError("malformed config file " + f.config_path + ": " + e.what());
    }
  }
  if (f.scheduler) doc["scheduler"] = *f.scheduler;
  if (f.env) doc["env"] = *f.env;
  if (f.seed) doc["seed"] = *f.seed;
  if (f.seeds) doc["seeds"] = *f.seeds;
  if (f.out_dir) doc["out_dir"] = *f.out_dir;
  if (f.gamma) doc["gamma"] = *f.gamma;
  if (f.n_train) doc["n_train"] = *f.n_train;
  if (f.n_bandit) doc["n_bandit"] = *f.n_bandit;
  if (f.n_controller) doc["n_controller"] = *f.n_controller;
  if (f.window) doc["window"] = *f.window;
  if (f.metric) doc["metric"] = *f.metric;
  if (f.k) doc["K"] = *f.k;
  return doc;
}

int do_run(const RunFlags& flags) {
  const auto config = dorb::parse_config(build_config_doc(flags));
  const auto result = dorb::run_experiment(config);
  int failed = 0;
  for (const auto& s : result.seeds) {
    if (s.ok) {
      std::cout << "seed " << s.seed << ": mean_of_metrics=" << s.mean_of_metrics
                << " min_of_metrics=" << s.min_of_metrics << '\n';
    } else {
      ++failed;
      std::cerr << "seed " << s.seed << " failed: " << s.error << '\n';
    }
  }
  std::cout << "wrote " << result.seeds.size() << " run(s) to " << config.out_dir.string() << '\n';
  return failed == 0 ? kOk : kRuntimeError;
}

int do_compare(const std::vector<std::string>& dirs, bool csv) {
  std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
  const auto table = dorb::compare_runs(paths);
  std::cout << (csv ? table.to_csv() : table.to_text());
  return kOk;
}

bool check(bool ok, const std::string& what) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << what << '\n';
  return ok;
}

int do_selftest() {
  bool ok = true;

  dorb::Exp3 bandit(3, 0.1, 7);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bool simplex = true;
  for (int t = 0; t < 2000; ++t) {
    const auto choice = bandit.choose();
    bandit.update(choice.arm, unit(rng));
    const auto p = bandit.probabilities();
    double total = 0.0;
    for (double v : p) {
      total += v;
      simplex = simplex && v >= 0.1 / 3.0 - 1e-12;
    }
    simplex = simplex && std::abs(total - 1.0) < 1e-9;
  }
  ok &= check(simplex, "exp3 simplex and exploration floor over 2000 rounds");

  auto one = dorb::Exp3(3, 0.1, 0);
  one.update(0, 1.0);
  ok &= check(std::abs(one.log_weights()[0] - one.log_weights()[1] - 0.1) < 1e-12, "exp3 update w0 = exp(0.1)");

  dorb::QuantileScaler scaler(10);
  scaler.observe(0.0);
  scaler.observe(1.0);
  ok &= check(std::abs(scaler.scale(0.5) - 0.5) < 1e-12 && scaler.scale(0.1) == 0.0 && scaler.scale(0.9) == 1.0,
              "quantile scaling branches");

  const dorb::TokenSeq cand{0, 2, 3}, ref{0, 1, 2, 3};
  ok &= check(std::abs(dorb::rouge_l_f1(cand, ref) - 6.0 / 7.0) < 1e-12, "rouge-l worked example");
  ok &= check(std::abs(dorb::bleu(dorb::TokenSeq{0, 0, 1}, dorb::TokenSeq{0, 1, 2}, 1) - 2.0 / 3.0) < 1e-12,
              "bleu clipped unigram example");

  dorb::SyntheticConfig sc;
  sc.num_metrics = 3;
  sc.learn_rate = 0.05;
  sc.seed = 3;
  dorb::SyntheticTrainer trainer(sc);
  auto cfg = dorb::webnlg_profile();
  cfg.n_train = 300;
  const auto log = dorb::run_sm_bandit(trainer, cfg);
  ok &= check(log.trainer_steps == 300 && log.records.size() == 31, "sm-bandit step accounting");

  return ok ? kOk : kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-reward bandit scheduling for policy-gradient training"};
  app.require_subcommand(1);

  RunFlags flags;
  auto* run = app.add_subcommand("run", "Run an experiment and write traces, summaries and an aggregate");
  run->add_option("--config", flags.config_path, "JSON config file");
  run->add_option("--scheduler", flags.scheduler, "single | alternate | random | sm | hm");
  run->add_option("--env", flags.env, "synthetic | toy-textgen");
  run->add_option("--seed", flags.seed, "Seed (first seed when --seeds is given)");
  run->add_option("--seeds", flags.seeds, "Number of consecutive seeds to run");
  run->add_option("--out-dir", flags.out_dir, "Output directory");
  run->add_option("--gamma", flags.gamma, "Exp3 exploration coefficient");
  run->add_option("--n-train", flags.n_train, "Total trainer steps");
  run->add_option("--n-bandit", flags.n_bandit, "Steps per bandit round");
  run->add_option("--n-controller", flags.n_controller, "Steps per controller round (hm)");
  run->add_option("--window", flags.window, "Quantile scaler window size");
  run->add_option("--metric", flags.metric, "Metric index for the single-reward scheduler");
  run->add_option("--K", flags.k, "Number of metrics (synthetic)");

  std::vector<std::string> dirs;
  bool csv = false;
  auto* compare = app.add_subcommand("compare", "Tabulate final metrics of finished runs");
  compare->add_option("run_dirs", dirs, "Run directories")->required();
  compare->add_flag("--csv", csv, "Emit CSV instead of an aligned table");

  auto* selftest = app.add_subcommand("selftest", "Check core invariants quickly");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (run->parsed()) return do_run(flags);
    if (compare->parsed()) return do_compare(dirs, csv);
    if (selftest->parsed()) return do_selftest();
  } catch (const dorb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kConfigError;
}
