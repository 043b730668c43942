#include "dorb/config.hpp"

#include <fstream>
#include <set>

namespace dorb {

using nlohmann::json;

std::string to_string(Environment env) { return env == Environment::Synthetic ? "synthetic" : "toy-textgen"; }

Environment parse_environment(const std::string& name) {
  if (name == "synthetic") return Environment::Synthetic;
  if (name == "toy-textgen") return Environment::ToyTextgen;
  throw ConfigError("unknown env '" + name + "' (expected synthetic or toy-textgen)");
}

namespace {

const std::set<std::string> kKnownKeys = {
    "profile",       "scheduler",          "env",          "K",
    "metric",        "seed",               "seeds",        "out_dir",
    "gamma",         "n_train",            "n_bandit",     "n_controller",
    "window",        "gain",               "eta",          "noise",
    "m_init",        "vocab",              "length",       "num_train_pairs",
    "num_val_pairs", "task_seed",          "lr",           "batch_size",
    "eval_subsample", "warm_start_target", "warm_start_lr", "warm_start_max_steps",
    "dump_task"};

template <typename T>
T get(const json& doc, const std::string& key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type or a malformed value");
  }
}

double get_real(const json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

std::size_t get_count(const json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError("config key '" + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kKnownKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  for (const char* required : {"scheduler", "env"}) {
    if (!doc.contains(required)) throw ConfigError(std::string("missing required config key '") + required + "'");
  }
  if (!doc.contains("seed") && !doc.contains("seeds")) throw ConfigError("missing required config key 'seed'");

  ExperimentConfig config;
  if (doc.contains("profile")) {
    const auto profile = get<std::string>(doc, "profile");
    if (profile == "qg") {
      config.schedule = qg_profile();
    } else if (profile != "webnlg") {
      throw ConfigError("unknown profile '" + profile + "' (expected qg or webnlg)");
    }
  }
  try {
    config.scheduler = parse_scheduler_kind(get<std::string>(doc, "scheduler"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  config.env = parse_environment(get<std::string>(doc, "env"));

  if (doc.contains("K")) config.num_metrics = get_count(doc, "K");
  if (doc.contains("metric")) config.metric = get_count(doc, "metric");
  if (doc.contains("out_dir")) config.out_dir = get<std::string>(doc, "out_dir");

  std::uint64_t base_seed = 0;
  if (doc.contains("seed")) base_seed = get_count(doc, "seed");
  if (doc.contains("seeds")) {
    const auto& seeds = doc.at("seeds");
    if (seeds.is_array()) {
      config.seeds.clear();
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (!seeds[i].is_number_integer() || seeds[i].get<std::int64_t>() < 0) {
          throw ConfigError("config key 'seeds' must hold nonnegative integers");
        }
        config.seeds.push_back(seeds[i].get<std::uint64_t>());
      }
    } else {
      const std::size_t count = get_count(doc, "seeds");
      config.seeds.clear();
      for (std::size_t i = 0; i < count; ++i) config.seeds.push_back(base_seed + i);
    }
  } else {
    config.seeds = {base_seed};
  }

  auto& s = config.schedule;
  if (doc.contains("gamma")) s.gamma = get_real(doc, "gamma");
  if (doc.contains("n_train")) s.n_train = get_count(doc, "n_train");
  if (doc.contains("n_bandit")) s.n_bandit = get_count(doc, "n_bandit");
  if (doc.contains("n_controller")) s.n_controller = get_count(doc, "n_controller");
  if (doc.contains("window")) s.scaler_window = get_count(doc, "window");

  if (doc.contains("gain")) config.gain = get<std::vector<std::vector<double>>>(doc, "gain");
  if (doc.contains("eta")) config.learn_rate = get_real(doc, "eta");
  if (doc.contains("noise")) config.noise_std = get_real(doc, "noise");
  if (doc.contains("m_init")) {
    const auto& v = doc.at("m_init");
    config.initial = v.is_array() ? get<std::vector<double>>(doc, "m_init") : std::vector<double>{get_real(doc, "m_init")};
  }

  auto& toy = config.toy;
  if (doc.contains("vocab")) toy.task.vocab_size = get_count(doc, "vocab");
  if (doc.contains("length")) toy.task.length = get_count(doc, "length");
  if (doc.contains("num_train_pairs")) toy.task.num_train = get_count(doc, "num_train_pairs");
  if (doc.contains("num_val_pairs")) toy.task.num_validation = get_count(doc, "num_val_pairs");
  if (doc.contains("task_seed")) toy.task.seed = get_count(doc, "task_seed");
  if (doc.contains("lr")) toy.lr = get_real(doc, "lr");
  if (doc.contains("batch_size")) toy.batch_size = get_count(doc, "batch_size");
  if (doc.contains("eval_subsample")) toy.eval_subsample = get_count(doc, "eval_subsample");
  if (doc.contains("warm_start_target")) toy.warm_start_target = get_real(doc, "warm_start_target");
  if (doc.contains("warm_start_lr")) toy.warm_start_lr = get_real(doc, "warm_start_lr");
  if (doc.contains("warm_start_max_steps")) toy.warm_start_max_steps = get_count(doc, "warm_start_max_steps");
  if (doc.contains("dump_task")) config.dump_task = get<bool>(doc, "dump_task");

  validate(config);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed config file " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

void validate(const ExperimentConfig& config) {
  if (config.seeds.empty()) throw ConfigError("seed list must be nonempty");
  if (config.num_metrics == 0) throw ConfigError("K must be at least 1");
  if (config.env == Environment::ToyTextgen && config.num_metrics != 3) {
    throw ConfigError("toy-textgen provides exactly 3 metrics (rouge_l, bleu, coverage); got K=" +
                      std::to_string(config.num_metrics));
  }
  if (config.metric >= config.num_metrics) throw ConfigError("metric index must be below K");
  if (!config.gain.empty()) {
    if (config.gain.size() != config.num_metrics) throw ConfigError("gain matrix must have K rows");
    for (const auto& row : config.gain) {
      if (row.size() != config.num_metrics) throw ConfigError("gain matrix must be K x K");
    }
  }
  if (!config.initial.empty() && config.initial.size() != 1 && config.initial.size() != config.num_metrics) {
    throw ConfigError("m_init must be a number or a list of K numbers");
  }
  if (!(config.learn_rate > 0.0)) throw ConfigError("eta must be positive");
  if (!(config.noise_std >= 0.0)) throw ConfigError("noise must be nonnegative");
  if (!(config.toy.lr > 0.0)) throw ConfigError("lr must be positive");
  if (config.toy.batch_size == 0) throw ConfigError("batch_size must be positive");
  try {
    config.schedule.validate(config.scheduler);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

json to_json(const ExperimentConfig& config) {
  const auto& s = config.schedule;
  json doc = {{"scheduler", std::string(to_string(config.scheduler))},
              {"env", to_string(config.env)},
              {"K", config.num_metrics},
              {"metric", config.metric},
              {"seeds", config.seeds},
              {"out_dir", config.out_dir.string()},
              {"gamma", s.gamma},
              {"n_train", s.n_train},
              {"n_bandit", s.n_bandit},
              {"n_controller", s.n_controller},
              {"window", s.scaler_window}};
  if (config.env == Environment::Synthetic) {
    doc["gain"] = config.gain;
    doc["eta"] = config.learn_rate;
    doc["noise"] = config.noise_std;
    doc["m_init"] = config.initial;
  } else {
    const auto& toy = config.toy;
    doc["vocab"] = toy.task.vocab_size;
    doc["length"] = toy.task.length;
    doc["num_train_pairs"] = toy.task.num_train;
    doc["num_val_pairs"] = toy.task.num_validation;
    doc["task_seed"] = toy.task.seed;
    doc["lr"] = toy.lr;
    doc["batch_size"] = toy.batch_size;
    doc["eval_subsample"] = toy.eval_subsample;
    doc["warm_start_target"] = toy.warm_start_target;
    doc["warm_start_lr"] = toy.warm_start_lr;
    doc["warm_start_max_steps"] = toy.warm_start_max_steps;
    doc["dump_task"] = config.dump_task;
  }
  return doc;
}

}  // namespace dorb
