#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "rrsim/experiment.hpp"

using namespace rrsim;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("rrsim_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.workload.synth.duration_us = 100'000;
  c.sim.sweep.conditions = {{90.0, 0}, {365.0, 1500}};
  c.sim.sweep.policies = {"baseline", "history", "pr2ar2", "history_pr2ar2"};
  return c;
}

}  // namespace

TEST_CASE("calibrate, characterize and run produce their artifacts") {
  const fs::path out = fresh_dir("pipeline");
  ExperimentConfig cfg = small_config();
  CHECK(cmd_calibrate(cfg, out).converged);
  CHECK(fs::exists(out / "params.json"));
  CHECK(fs::exists(out / "calibration.json"));

  const auto table = cmd_characterize(cfg, out);
  CHECK(fs::exists(out / "best_tr.csv"));
  CHECK(table.lookup({365.0, 1500}) == doctest::Approx(0.75));

  cfg.sim.policy = "pr2ar2";
  const Summary s = cmd_run(cfg, out);
  CHECK(s.requests > 0);
  CHECK(fs::exists(out / "result_pr2ar2_365d_1500pe.csv"));
  CHECK(fs::exists(out / "summary_pr2ar2_365d_1500pe.json"));
  CHECK(fs::exists(out / "resolved_config.json"));
  const std::string first = slurp(out / "result_pr2ar2_365d_1500pe.csv");

  SUBCASE("rerun is byte-identical") {
    cmd_run(cfg, out);
    CHECK(slurp(out / "result_pr2ar2_365d_1500pe.csv") == first);
  }
  SUBCASE("resolved config reproduces the run") {
    ExperimentConfig echo = load_config((out / "resolved_config.json").string());
    cmd_run(echo, out);
    CHECK(slurp(out / "result_pr2ar2_365d_1500pe.csv") == first);
  }
  SUBCASE("sweep writes one summary per cell and a comparison table") {
    const auto rows = cmd_sweep(cfg, out);
    for (const auto& cond : cfg.sim.sweep.conditions)
      for (const auto& p : cfg.sim.sweep.policies)
        CHECK(fs::exists(out / "sweep" / (condition_tag(cond) + "_" + p) / "summary.json"));
    CHECK(fs::exists(out / "sweep" / "comparison.csv"));
    // baseline vs {history, pr2ar2, history_pr2ar2} and history vs history_pr2ar2
    CHECK(rows.size() == cfg.sim.sweep.conditions.size() * 4);
    const auto base = load_summary((out / "sweep" / "365d_1500pe_baseline" / "summary.json").string());
    const auto cand = load_summary((out / "sweep" / "365d_1500pe_pr2ar2" / "summary.json").string());
    CHECK(compare(base, cand).mean_reduction_pct > 0.0);
  }
}

TEST_CASE("missing prerequisites name the subcommand to run") {
  const fs::path out = fresh_dir("missing");
  ExperimentConfig cfg = small_config();
  try {
    cmd_run(cfg, out);
    FAIL("expected an error");
  } catch (const PrerequisiteError& e) {
    CHECK(std::string(e.what()).find("calibrate") != std::string::npos);
  }
  save_params(out / "params.json", ModelParams{});
  cfg.sim.policy = "ar2";
  try {
    cmd_run(cfg, out);
    FAIL("expected an error");
  } catch (const PrerequisiteError& e) {
    CHECK(std::string(e.what()).find("characterize") != std::string::npos);
  }
}

TEST_CASE("trace workloads are replayed from file") {
  const fs::path out = fresh_dir("trace");
  {
    std::ofstream t(out / "trace.csv");
    t << "arrival_us,op,lba_4k,n_4k\n0,R,0,4\n10,R,4,4\n20,W,100,1\n";
  }
  ExperimentConfig cfg = small_config();
  cfg.workload.trace = (out / "trace.csv").string();
  const auto reqs = load_workload(cfg);
  CHECK(reqs.size() == 3);
  save_params(out / "params.json", ModelParams{});
  const Summary s = cmd_run(cfg, out);
  CHECK(s.requests == 3);
}

TEST_CASE("atomic writes leave no temporary behind") {
  const fs::path out = fresh_dir("atomic");
  atomic_write(out / "a" / "b.txt", "hello");
  CHECK(slurp(out / "a" / "b.txt") == "hello");
  CHECK_FALSE(fs::exists(out / "a" / "b.txt.tmp"));
}

TEST_CASE("command-line front end") {
  const fs::path out = fresh_dir("cli");
  const std::string cli = RRSIM_CLI_PATH;
  auto run = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " > " + (out / "stdout.txt").string() + " 2> " +
                            (out / "stderr.txt").string();
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  CHECK(run("run --out " + out.string()) == 2);
  CHECK(slurp(out / "stderr.txt").find("calibrate") != std::string::npos);
  CHECK(run("frobnicate") != 0);
  {
    std::ofstream bad(out / "bad.json");
    bad << R"({"sim": {"colour": 1}})";
  }
  CHECK(run("run --config " + (out / "bad.json").string() + " --out " + out.string()) == 1);
  CHECK(slurp(out / "stderr.txt").find("sim.colour") != std::string::npos);

  {
    std::ofstream cfg(out / "cfg.json");
    cfg << R"({"workload": {"duration_us": 50000}})";
  }
  const std::string common = " --config " + (out / "cfg.json").string() + " --out " + out.string();
  CHECK(run("calibrate" + common) == 0);
  CHECK(run("characterize" + common) == 0);
  CHECK(run("run --policy pr2ar2 --condition 365:1500 --seed 3" + common) == 0);
  CHECK(run("run --policy baseline --condition 365:1500 --seed 3" + common) == 0);
  CHECK(run("compare " + (out / "summary_baseline_365d_1500pe.json").string() + " " +
            (out / "summary_pr2ar2_365d_1500pe.json").string()) == 0);
  CHECK(slurp(out / "stdout.txt").find("mean_reduction_pct") != std::string::npos);
  CHECK(run("run --policy baseline --condition 90:0 --seed 3" + common) == 0);
  CHECK(run("compare " + (out / "summary_baseline_90d_0pe.json").string() + " " +
            (out / "summary_pr2ar2_365d_1500pe.json").string()) == 1);
}
