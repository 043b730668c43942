#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "dorb/config.hpp"
#include "dorb/experiment.hpp"
#include "dorb/synthetic_trainer.hpp"
#include "dorb/trace_io.hpp"

using namespace dorb;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("dorb_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json base_doc(const fs::path& out) {
  return {{"scheduler", "sm"}, {"env", "synthetic"}, {"seeds", {1, 2, 3}}, {"n_train", 300},
          {"noise", 0.0},      {"out_dir", out.string()}};
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(DORB_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config defaults and overrides") {
  const auto c = parse_config({{"scheduler", "hm"}, {"env", "synthetic"}, {"seed", 4}, {"seeds", 3}, {"profile", "qg"}});
  CHECK(c.scheduler == SchedulerKind::HmBandit);
  CHECK(c.seeds == std::vector<std::uint64_t>{4, 5, 6});
  CHECK(c.schedule.gamma == 0.1);
  CHECK(c.schedule.n_bandit == 100);
  CHECK(c.num_metrics == 3);
  const auto again = parse_config(json::parse(to_json(c).dump()));
  CHECK(to_json(again) == to_json(c));
}

TEST_CASE("config errors") {
  const json ok = {{"scheduler", "sm"}, {"env", "synthetic"}, {"seed", 0}};
  CHECK_NOTHROW(parse_config(ok));
  auto with = [&](const std::string& key, const json& value) {
    json d = ok;
    d[key] = value;
    return d;
  };
  CHECK_THROWS_AS(parse_config(with("gamma", 1.5)), ConfigError);
  CHECK_THROWS_AS(parse_config(with("gamma", "high")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("n_bandit", 0)), ConfigError);
  CHECK_THROWS_AS(parse_config(with("n_bandit", -3)), ConfigError);
  CHECK_THROWS_AS(parse_config(with("scheduler", "ucb")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("env", "squad")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("colour", 1)), ConfigError);
  CHECK_THROWS_AS(parse_config(with("metric", 3)), ConfigError);
  CHECK_THROWS_AS(parse_config(with("gain", json{{1, 0}, {0, 1}})), ConfigError);
  CHECK_THROWS_AS(parse_config(with("seeds", json::array())), ConfigError);
  CHECK_THROWS_AS(parse_config(with("profile", "squad")), ConfigError);
  json toy = with("env", "toy-textgen");
  toy["K"] = 4;
  CHECK_THROWS_AS(parse_config(toy), ConfigError);
  json missing = ok;
  missing.erase("env");
  CHECK_THROWS_AS(parse_config(missing), ConfigError);
  missing = ok;
  missing.erase("seed");
  CHECK_THROWS_AS(parse_config(missing), ConfigError);
  CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
}

TEST_CASE("trace round-trip") {
  SyntheticConfig sc;
  sc.noise_std = 0.02;
  sc.seed = 3;
  SyntheticTrainer t(sc);
  ScheduleConfig cfg;
  cfg.n_train = 200;
  const auto log = run_hm_bandit(t, cfg);
  std::stringstream buf;
  write_trace(buf, log);
  const auto trace = read_trace(buf);
  CHECK(trace.header == trace_header(3));
  REQUIRE(trace.rows.size() == log.records.size());
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const auto& row = trace.rows[i];
    const auto& rec = log.records[i];
    CHECK(row.step == rec.step);
    CHECK(row.controller == rec.controller);
    CHECK(row.arm == rec.arm);
    CHECK(row.probabilities == rec.probabilities);
    CHECK(row.raw == rec.raw);
    CHECK(row.scaled_reward == rec.bandit_reward);
    CHECK(is_simplex(row.probabilities));
  }
  CHECK(trace_header(2) == std::vector<std::string>{"step", "controller_index", "arm", "p_0", "p_1", "raw_m_0",
                                                    "raw_m_1", "scaled_r"});
}

TEST_CASE("trace reader rejects malformed input") {
  std::stringstream bad_header("a,b,c\n");
  CHECK_THROWS(read_trace(bad_header));
  std::stringstream bad_row("step,controller_index,arm,p_0,raw_m_0,scaled_r\n0,,0,1\n");
  CHECK_THROWS(read_trace(bad_row));
  std::stringstream bad_num("step,controller_index,arm,p_0,raw_m_0,scaled_r\n0,,0,x,0.5,\n");
  CHECK_THROWS(read_trace(bad_num));
}

TEST_CASE("simplex check") {
  CHECK(is_simplex(std::vector<double>{0.2, 0.8}));
  CHECK(!is_simplex(std::vector<double>{0.2, 0.7}));
  CHECK(!is_simplex(std::vector<double>{-0.1, 1.1}));
  CHECK(!is_simplex(std::vector<double>{}));
}

TEST_CASE("experiment writes one trace and summary per seed plus an aggregate") {
  const auto dir = scratch("files");
  const auto result = run_experiment(parse_config(base_doc(dir)));
  REQUIRE(result.seeds.size() == 3);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    (void)e;
    ++files;
  }
  CHECK(files == 7);
  for (int s : {1, 2, 3}) {
    CHECK(fs::exists(dir / ("trace_" + std::to_string(s) + ".csv")));
    const auto summary = json::parse(slurp(dir / ("summary_" + std::to_string(s) + ".json")));
    CHECK(summary["status"] == "ok");
    CHECK(summary["trainer_steps"] == 300);
    CHECK(summary["evaluations"] == 31);
  }
  const auto agg = json::parse(slurp(dir / "aggregate.json"));
  CHECK(agg["seeds_ok"].size() == 3);
  // Sample standard deviation across seeds.
  double mean = 0, sq = 0;
  for (const auto& s : result.seeds) mean += s.final_metrics[0] / 3.0;
  for (const auto& s : result.seeds) sq += (s.final_metrics[0] - mean) * (s.final_metrics[0] - mean);
  CHECK(agg["metrics"]["m0"]["mean"].get<double>() == doctest::Approx(mean));
  CHECK(agg["metrics"]["m0"]["std"].get<double>() == doctest::Approx(std::sqrt(sq / 2.0)));
  fs::remove_all(dir);
}

TEST_CASE("identical config and seed give identical files") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  for (const char* kind : {"random", "sm", "hm"}) {
    auto da = base_doc(a), db = base_doc(b);
    da["scheduler"] = db["scheduler"] = kind;
    da["noise"] = db["noise"] = 0.05;
    run_experiment(parse_config(da));
    run_experiment(parse_config(db));
    for (int s : {1, 2, 3}) {
      const auto name = "trace_" + std::to_string(s) + ".csv";
      CHECK(slurp(a / name) == slurp(b / name));
    }
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("a failing seed is recorded and the others still run") {
  const auto dir = scratch("fail");
  auto doc = base_doc(dir);
  doc["env"] = "toy-textgen";
  doc["seeds"] = {0};
  doc["warm_start_target"] = 1.01;  // unreachable
  doc["warm_start_max_steps"] = 2;
  doc["batch_size"] = 8;
  const auto result = run_experiment(parse_config(doc));
  REQUIRE(result.seeds.size() == 1);
  CHECK(!result.seeds[0].ok);
  const auto summary = json::parse(slurp(dir / "summary_0.json"));
  CHECK(summary["status"] == "failed");
  CHECK(json::parse(slurp(dir / "aggregate.json"))["seeds_failed"].size() == 1);
  fs::remove_all(dir);
}

TEST_CASE("compare") {
  const auto a = scratch("cmp_a"), b = scratch("cmp_b"), c = scratch("cmp_c");
  run_experiment(parse_config(base_doc(a)));
  fs::copy(a, b, fs::copy_options::recursive);
  const auto table = compare_runs({a, b});
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0] == table.rows[1]);
  CHECK(table.header.back() == "min_of_metrics");
  CHECK(table.to_text().find("# row 2: " + b.string()) != std::string::npos);
  CHECK(table.to_csv().rfind("scheduler,env,seeds,m0,m1,m2,mean_of_metrics,min_of_metrics\n", 0) == 0);

  CHECK_THROWS_AS(compare_runs({a}), ConfigError);
  CHECK_THROWS_AS(compare_runs({a, scratch("cmp_missing")}), ConfigError);
  auto doc = base_doc(c);
  doc["K"] = 2;
  run_experiment(parse_config(doc));
  CHECK_THROWS_AS(compare_runs({a, c}), ConfigError);
  for (const auto& d : {a, b, c}) fs::remove_all(d);
}

TEST_CASE("unwritable output directory") {
  const auto file = scratch("blocker");
  std::ofstream(file) << "x";
  auto doc = base_doc(file / "sub");
  CHECK_THROWS_AS(run_experiment(parse_config(doc)), std::runtime_error);
  fs::remove(file);
}

TEST_CASE("cli exit codes") {
  const auto dir = scratch("cli");
  CHECK(run_cli("run --scheduler sm --env synthetic --seed 0 --n-train 100 --out-dir " + dir.string()) == 0);
  CHECK(fs::exists(dir / "trace_0.csv"));
  CHECK(run_cli("run --scheduler sm --env synthetic --seed 0 --gamma 1.5 --out-dir " + dir.string()) == 1);
  CHECK(run_cli("run --scheduler nope --env synthetic --seed 0 --out-dir " + dir.string()) == 1);
  CHECK(run_cli("run --env synthetic --seed 0 --out-dir " + dir.string()) == 1);
  CHECK(run_cli("run --scheduler sm --env synthetic --seed 0 --config /nonexistent.json") == 1);
  CHECK(run_cli("compare " + dir.string() + " " + (dir / "absent").string()) == 1);
  CHECK(run_cli("frobnicate") == 1);
  CHECK(run_cli("selftest") == 0);
  fs::remove_all(dir);
}
