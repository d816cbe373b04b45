#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "grail/config_io.hpp"
#include "grail/experiment.hpp"
#include "grail/io.hpp"

namespace fs = std::filesystem;
using namespace grail;

namespace {

struct CmdResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

fs::path scratch_root() {
  static fs::path root = [] {
    fs::path p = fs::temp_directory_path() / "grail_cli_test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = scratch_root() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CmdResult run_cli(const std::string& args) {
  static int counter = 0;
  fs::path out_file = scratch_root() / ("stdout." + std::to_string(counter));
  fs::path err_file = scratch_root() / ("stderr." + std::to_string(counter));
  ++counter;
  std::string cmd = std::string(GRAIL_LAB_BIN) + " " + args + " >" +
                    out_file.string() + " 2>" + err_file.string();
  int status = std::system(cmd.c_str());
  CmdResult result;
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  return result;
}

bool same_bytes(const fs::path& a, const fs::path& b) { return slurp(a) == slurp(b); }

const char* kRunFiles[] = {"trials.csv", "evals.csv", "values.csv", "summary.csv",
                           "config.resolved.json"};

}  // namespace

TEST_CASE("run writes the full artifact set") {
  fs::path dir = fresh_dir("run_exp1");
  auto r = run_cli("run --preset exp1 --out " + dir.string());
  REQUIRE(r.code == 0);
  CHECK(r.err.empty());
  CHECK(r.out.find("goal  trials_to_criterion") != std::string::npos);
  CHECK(r.out.find("outputs: " + dir.string()) != std::string::npos);
  for (const char* f : kRunFiles) CHECK(fs::exists(dir / f));

  auto config = config_from_json_text(slurp(dir / "config.resolved.json"));
  CHECK(config == make_preset("exp1"));

  std::ifstream trials_in(dir / "trials.csv");
  auto trials = read_trials_csv(trials_in);
  CHECK(trials.size() == 4000);
  std::ifstream evals_in(dir / "evals.csv");
  auto evals = read_evals_csv(evals_in);
  CHECK(evals.size() == 81);
}

TEST_CASE("identical invocations produce identical bytes") {
  fs::path a = fresh_dir("rerun_a");
  fs::path b = fresh_dir("rerun_b");
  REQUIRE(run_cli("run --preset exp2 --out " + a.string()).code == 0);
  REQUIRE(run_cli("run --preset exp2 --out " + b.string()).code == 0);
  for (const char* f : kRunFiles) CHECK(same_bytes(a / f, b / f));
}

TEST_CASE("seed override changes the run") {
  fs::path a = fresh_dir("seed_a");
  fs::path b = fresh_dir("seed_b");
  REQUIRE(run_cli("run --preset exp1 --seed 7 --out " + a.string()).code == 0);
  REQUIRE(run_cli("run --preset exp1 --seed 8 --out " + b.string()).code == 0);
  CHECK_FALSE(same_bytes(a / "trials.csv", b / "trials.csv"));
  auto config = config_from_json_text(slurp(a / "config.resolved.json"));
  CHECK(config.seed == 7);
}

TEST_CASE("config file round-trips through run") {
  fs::path dir = fresh_dir("cfg_roundtrip");
  ExperimentConfig config = make_preset("exp1");
  config.total_trials = 400;
  config.seed = 42;
  fs::path cfg = dir / "config.json";
  write_text_file(cfg, config_to_json_text(config));

  fs::path out1 = fresh_dir("cfg_out1");
  auto r = run_cli("run --config " + cfg.string() + " --out " + out1.string());
  REQUIRE(r.code == 0);
  auto resolved = config_from_json_text(slurp(out1 / "config.resolved.json"));
  CHECK(resolved == config);

  // Re-running from the resolved copy reproduces the same trial log.
  fs::path out2 = fresh_dir("cfg_out2");
  r = run_cli("run --config " + (out1 / "config.resolved.json").string() +
              " --out " + out2.string());
  REQUIRE(r.code == 0);
  CHECK(same_bytes(out1 / "trials.csv", out2 / "trials.csv"));
}

TEST_CASE("overrides land in the resolved config") {
  fs::path dir = fresh_dir("overrides");
  auto r = run_cli("run --preset exp1 --selector grail --eval-interval 1000 --out " +
                   dir.string());
  REQUIRE(r.code == 0);
  auto config = config_from_json_text(slurp(dir / "config.resolved.json"));
  CHECK(config.selector_kind == SelectorKind::Grail);
  CHECK(config.eval_interval == 1000);

  fs::path dir2 = fresh_dir("overrides_backend");
  r = run_cli("run --preset exp1 --backend actor-critic --out " + dir2.string());
  REQUIRE(r.code == 0);
  auto config2 = config_from_json_text(slurp(dir2 / "config.resolved.json"));
  CHECK(config2.backend_kind == SkillBackendKind::ActorCritic);
  CHECK(config2.eval_attempts == 1);
}

TEST_CASE("GRAIL_LAB_OUT supplies the default output directory") {
  fs::path env_dir = fresh_dir("env_out");
  REQUIRE(setenv("GRAIL_LAB_OUT", env_dir.string().c_str(), 1) == 0);
  auto r = run_cli("run --preset exp1 --seed 3");
  REQUIRE(r.code == 0);
  CHECK(fs::exists(env_dir / "trials.csv"));

  // An explicit --out wins over the environment.
  fs::path flag_dir = fresh_dir("flag_out");
  r = run_cli("run --preset exp1 --seed 3 --out " + flag_dir.string());
  REQUIRE(r.code == 0);
  CHECK(fs::exists(flag_dir / "trials.csv"));
  CHECK(same_bytes(env_dir / "trials.csv", flag_dir / "trials.csv"));
  REQUIRE(unsetenv("GRAIL_LAB_OUT") == 0);
}

TEST_CASE("bad arguments exit with status 2") {
  CHECK(run_cli("run --preset exp1 --selector bogus --out " +
                fresh_dir("bad_sel").string())
            .code == 2);
  auto r = run_cli("run --preset exp1 --selector bogus");
  CHECK(r.code == 2);
  CHECK(r.err.find("valid: grail, c-grail, m-grail") != std::string::npos);

  r = run_cli("run");
  CHECK(r.code == 2);
  CHECK(r.err.find("exactly one of --preset or --config") != std::string::npos);

  CHECK(run_cli("run --preset exp1 --config nowhere.json").code == 2);
  CHECK(run_cli("run --preset exp4").code == 2);
  CHECK(run_cli("run --preset exp1 --frobnicate").code == 2);
  CHECK(run_cli("frobnicate").code == 2);

  // A missing config file is an I/O failure, not a usage error.
  CHECK(run_cli("run --config nowhere.json").code == 1);
}

TEST_CASE("help and presets") {
  auto help = run_cli("--help");
  CHECK(help.code == 0);
  for (const char* sub : {"run", "replicate", "presets", "summarize"})
    CHECK(help.out.find(sub) != std::string::npos);

  auto presets = run_cli("presets");
  CHECK(presets.code == 0);
  CHECK(presets.out.find("exp1") != std::string::npos);
  CHECK(presets.out.find("exp2") != std::string::npos);
}

TEST_CASE("replicate with one seed matches a plain run") {
  fs::path rep = fresh_dir("rep_one");
  auto r = run_cli("replicate --preset exp1 --seeds 1 --out " + rep.string());
  REQUIRE(r.code == 0);
  CHECK(r.out.find("median over 1 seeds") != std::string::npos);
  REQUIRE(fs::exists(rep / "aggregate.csv"));
  REQUIRE(fs::exists(rep / "seed_1" / "trials.csv"));

  fs::path solo = fresh_dir("rep_solo");
  REQUIRE(run_cli("run --preset exp1 --seed 1 --out " + solo.string()).code == 0);
  for (const char* f : kRunFiles)
    CHECK(same_bytes(rep / "seed_1" / f, solo / f));

  // With a single seed every quantile collapses onto that run's curve.
  std::ifstream agg_in(rep / "aggregate.csv");
  auto points = read_aggregate_csv(agg_in);
  std::ifstream evals_in(solo / "evals.csv");
  auto evals = read_evals_csv(evals_in);
  REQUIRE(points.size() == evals.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    CHECK(points[i].trial == evals[i].trial);
    for (int g = 0; g < 6; ++g) {
      CHECK(points[i].median[g] == doctest::Approx(evals[i].success[g]).epsilon(1e-12));
      CHECK(points[i].q25[g] == doctest::Approx(evals[i].success[g]).epsilon(1e-12));
      CHECK(points[i].q75[g] == doctest::Approx(evals[i].success[g]).epsilon(1e-12));
    }
  }
}

TEST_CASE("replicate is independent of job count and accepts seed lists") {
  fs::path one = fresh_dir("jobs_one");
  fs::path two = fresh_dir("jobs_two");
  REQUIRE(run_cli("replicate --preset exp1 --seeds 3 --jobs 1 --out " +
                  one.string())
              .code == 0);
  REQUIRE(run_cli("replicate --preset exp1 --seeds 3 --jobs 2 --out " +
                  two.string())
              .code == 0);
  CHECK(same_bytes(one / "aggregate.csv", two / "aggregate.csv"));
  for (int s : {1, 2, 3})
    CHECK(same_bytes(one / ("seed_" + std::to_string(s)) / "trials.csv",
                     two / ("seed_" + std::to_string(s)) / "trials.csv"));

  fs::path listed = fresh_dir("seed_list");
  REQUIRE(run_cli("replicate --preset exp1 --seeds 5,9 --out " + listed.string())
              .code == 0);
  CHECK(fs::exists(listed / "seed_5" / "trials.csv"));
  CHECK(fs::exists(listed / "seed_9" / "trials.csv"));
  CHECK_FALSE(fs::exists(listed / "seed_1"));

  CHECK(run_cli("replicate --preset exp1 --seeds 0").code == 2);
  CHECK(run_cli("replicate --preset exp1 --seeds 1,x").code == 2);
  CHECK(run_cli("replicate --preset exp1").code == 2);
}

TEST_CASE("summarize reads run and replicate directories") {
  fs::path run_dir = fresh_dir("sum_run");
  REQUIRE(run_cli("run --preset exp2 --out " + run_dir.string()).code == 0);

  auto text = run_cli("summarize " + run_dir.string());
  CHECK(text.code == 0);
  CHECK(text.out.find("goal  trials_to_criterion  final_success") != std::string::npos);
  CHECK(text.out.find("a") != std::string::npos);

  auto csv = run_cli("summarize " + run_dir.string() + " --format csv");
  REQUIRE(csv.code == 0);
  std::istringstream lines(csv.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "goal,trials_to_criterion,final_success");
  int n_rows = 0;
  std::string line;
  while (std::getline(lines, line)) {
    ++n_rows;
    CHECK(line.find(',') != std::string::npos);
  }
  CHECK(n_rows == 6);

  fs::path rep_dir = fresh_dir("sum_rep");
  REQUIRE(run_cli("replicate --preset exp1 --seeds 2 --out " + rep_dir.string())
              .code == 0);
  CHECK(run_cli("summarize " + rep_dir.string()).code == 0);

  auto empty = run_cli("summarize " + fresh_dir("sum_empty").string());
  CHECK(empty.code == 2);
  CHECK(empty.err.find("no summary.csv or aggregate.csv") != std::string::npos);

  CHECK(run_cli("summarize " + run_dir.string() + " --format yaml").code == 2);
  CHECK(run_cli("summarize").code == 2);
}
