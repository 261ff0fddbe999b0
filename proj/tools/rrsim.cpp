// rrsim command-line front end.
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rrsim/experiment.hpp"

namespace fs = std::filesystem;
using namespace rrsim;

namespace {

struct Common {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::string policy;
  std::string condition;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON experiment config (defaults apply when omitted)");
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_option("--seed", c.seed, "override sim.seed");
  cmd->add_option("--policy", c.policy, "override sim.policy");
  cmd->add_option("--condition", c.condition, "override sim.condition as <days>:<pec>");
}

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
  if (c.seed) cfg.sim.seed = *c.seed;
  if (!c.policy.empty()) cfg.sim.policy = c.policy;
  if (!c.condition.empty()) cfg.sim.condition = parse_condition(c.condition);
  cfg.validate();
  fs::create_directories(c.out);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-driven SSD read-retry simulator"};
  app.require_subcommand(1);

  Common calib_opts, char_opts, run_opts, sweep_opts;
  auto* calib = app.add_subcommand("calibrate", "fit model parameters to the calibration targets");
  add_common(calib, calib_opts);
  auto* charz = app.add_subcommand("characterize", "build the best-tR table from calibrated parameters");
  add_common(charz, char_opts);
  auto* run = app.add_subcommand("run", "simulate one policy at one condition");
  add_common(run, run_opts);
  auto* sweep = app.add_subcommand("sweep", "simulate every configured policy at every sweep condition");
  add_common(sweep, sweep_opts);

  std::string base_path, cand_path, cmp_out;
  auto* cmp = app.add_subcommand("compare", "compare two run summaries");
  cmp->add_option("baseline", base_path, "baseline summary JSON")->required();
  cmp->add_option("candidate", cand_path, "candidate summary JSON")->required();
  cmp->add_option("--out", cmp_out, "write the comparison JSON here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (calib->parsed()) {
      const auto cfg = resolve(calib_opts);
      const auto res = cmd_calibrate(cfg, calib_opts.out);
      std::cout << fmt::format("retention_coeff={:.4f} sensing_inflation_exp={:.4f} mean_retry_steps={:.3f} "
                               "best_tr_scale={:.2f} evaluations={} converged={}\n",
                               res.params.retention_coeff, res.params.sensing_inflation_exp, res.mean_retry_steps,
                               res.best_tr_scale, res.evaluations, res.converged);
      if (!res.converged) {
        std::cerr << "error: calibration did not reach its targets; residuals are in calibration.json\n";
        return 3;
      }
    } else if (charz->parsed()) {
      const auto cfg = resolve(char_opts);
      const auto table = cmd_characterize(cfg, char_opts.out);
      table.write_csv(std::cout);
    } else if (run->parsed()) {
      const auto cfg = resolve(run_opts);
      const auto s = cmd_run(cfg, run_opts.out);
      std::cout << to_json(s).dump(2) << "\n";
    } else if (sweep->parsed()) {
      const auto cfg = resolve(sweep_opts);
      const auto rows = cmd_sweep(cfg, sweep_opts.out);
      write_comparison_csv(std::cout, rows);
    } else if (cmp->parsed()) {
      const auto c = compare(load_summary(base_path), load_summary(cand_path));
      const std::string text = to_json(c).dump(2) + "\n";
      if (!cmp_out.empty()) atomic_write(cmp_out, text);
      std::cout << text;
    }
  } catch (const PrerequisiteError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
