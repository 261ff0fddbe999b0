#include "rrsim/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace rrsim {

namespace fs = std::filesystem;
using nlohmann::json;

void atomic_write(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<Request> load_workload(const ExperimentConfig& cfg) {
  if (!cfg.workload.trace.empty()) return parse_trace(cfg.workload.trace);
  return generate(cfg.workload.synth, cfg.sim.seed);
}

std::uint64_t workload_hash(const std::vector<Request>& requests) {
  std::ostringstream os;
  write_trace(os, requests);
  return fnv1a64(os.str());
}

std::uint64_t config_hash(const ExperimentConfig& cfg) { return fnv1a64(to_json(cfg).dump()); }

fs::path params_path(const ExperimentConfig& cfg, const fs::path& out) {
  return cfg.sim.params_file.empty() ? out / "params.json" : fs::path(cfg.sim.params_file);
}

fs::path best_tr_path(const ExperimentConfig& cfg, const fs::path& out) {
  return cfg.sim.best_tr_file.empty() ? out / "best_tr.csv" : fs::path(cfg.sim.best_tr_file);
}

void save_params(const fs::path& path, const ModelParams& params) {
  atomic_write(path, json{{"model", model_to_json(params)}}.dump(2) + "\n");
}

ModelParams load_params(const fs::path& path) {
  if (!fs::exists(path))
    throw PrerequisiteError(fmt::format("calibrated parameters not found at {}; run `rrsim calibrate` first",
                                        path.string()));
  std::ifstream in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(fmt::format("params file {}: {}", path.string(), e.what()));
  }
  if (!j.is_object() || !j.contains("model") || j.size() != 1)
    throw std::invalid_argument(fmt::format("params file {} must hold a single 'model' object", path.string()));
  return model_from_json(j.at("model"));
}

BestTrTable load_best_tr(const fs::path& path) {
  if (!fs::exists(path))
    throw PrerequisiteError(fmt::format("best-tR table not found at {}; run `rrsim characterize` first",
                                        path.string()));
  return BestTrTable::load(path.string());
}

EccConfig characterization_ecc(const ExperimentConfig& cfg) {
  EccConfig e = cfg.ecc;
  e.deterministic_mode = true;
  e.guardband_sigmas = cfg.retry.characterize_guardband_sigmas;
  return e;
}

SimConfig make_sim_config(const ExperimentConfig& cfg, const ModelParams& params, const BestTrTable& best_tr,
                          const std::string& policy, const OperatingCondition& cond) {
  SimConfig s;
  s.model = params;
  s.ecc = cfg.ecc;
  s.timing = cfg.timing;
  s.geometry = cfg.geometry;
  s.table = cfg.retry.table();
  s.policy = policy_from_name(policy);
  s.condition = cond;
  s.seed = cfg.sim.seed;
  s.adaptive_tr_scale = s.policy.adaptive_tr ? best_tr.lookup(cond) : 1.0;
  s.history_group_blocks = cfg.retry.history_group_blocks;
  return s;
}

RunOutput run_policy(const ExperimentConfig& cfg, const ModelParams& params, const BestTrTable& best_tr,
                     const std::vector<Request>& requests, const std::string& policy, const OperatingCondition& cond) {
  const SimConfig sc = make_sim_config(cfg, params, best_tr, policy, cond);
  RunOutput out;
  out.result = simulate(requests, sc);
  RunMeta meta{policy, cond, cfg.sim.seed, workload_hash(requests), config_hash(cfg)};
  out.summary = aggregate(out.result, meta);
  return out;
}

std::string condition_tag(const OperatingCondition& c) {
  return fmt::format("{}d_{}pe", c.retention_days, c.pe_cycles);
}

namespace {

void write_resolved(const ExperimentConfig& cfg, const fs::path& out) {
  atomic_write(out / "resolved_config.json", to_json(cfg).dump(2) + "\n");
}

std::string result_csv(const SimResult& r) {
  std::ostringstream os;
  r.write_csv(os);
  return os.str();
}

}  // namespace

CalibrationResult cmd_calibrate(const ExperimentConfig& cfg, const fs::path& out) {
  const CalibrationResult res =
      calibrate(cfg.model, cfg.calibration, cfg.retry.table(), cfg.ecc, characterization_ecc(cfg), cfg.retry.tr_grid);
  save_params(params_path(cfg, out), res.params);
  json report = {{"converged", res.converged},
                 {"evaluations", res.evaluations},
                 {"mean_retry_steps", res.mean_retry_steps},
                 {"steps_residual", res.steps_residual},
                 {"best_tr_scale", res.best_tr_scale},
                 {"tr_residual", res.tr_residual},
                 {"retention_coeff", res.params.retention_coeff},
                 {"sensing_inflation_exp", res.params.sensing_inflation_exp}};
  atomic_write(out / "calibration.json", report.dump(2) + "\n");
  write_resolved(cfg, out);
  return res;
}

BestTrTable cmd_characterize(const ExperimentConfig& cfg, const fs::path& out) {
  const ModelParams params = load_params(params_path(cfg, out));
  BestTrTable table =
      characterize_best_tr(params, cfg.retry.conditions, cfg.retry.table(), characterization_ecc(cfg), cfg.retry.tr_grid);
  for (const auto& e : table.entries())
    if (e.beyond_ecc)
      std::cerr << fmt::format("warning: condition {} fails ECC even at full tR; recorded as 1.00\n",
                               to_string(e.condition));
  std::ostringstream os;
  table.write_csv(os);
  atomic_write(best_tr_path(cfg, out), os.str());
  write_resolved(cfg, out);
  return table;
}

Summary cmd_run(const ExperimentConfig& cfg, const fs::path& out) {
  const ModelParams params = load_params(params_path(cfg, out));
  const bool adaptive = policy_from_name(cfg.sim.policy).adaptive_tr;
  const BestTrTable best_tr = adaptive ? load_best_tr(best_tr_path(cfg, out)) : BestTrTable{};
  const auto requests = load_workload(cfg);
  const RunOutput run = run_policy(cfg, params, best_tr, requests, cfg.sim.policy, cfg.sim.condition);
  const std::string stem = fmt::format("{}_{}", cfg.sim.policy, condition_tag(cfg.sim.condition));
  atomic_write(out / ("result_" + stem + ".csv"), result_csv(run.result));
  atomic_write(out / ("summary_" + stem + ".json"), to_json(run.summary).dump(2) + "\n");
  write_resolved(cfg, out);
  return run.summary;
}

std::vector<std::pair<std::string, std::string>> comparison_pairs(const std::vector<std::string>& policies) {
  auto has = [&](const std::string& p) { return std::find(policies.begin(), policies.end(), p) != policies.end(); };
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& p : policies) {
    if (p != "baseline" && has("baseline")) pairs.emplace_back("baseline", p);
    if (p != "history" && p.rfind("history", 0) == 0 && has("history")) pairs.emplace_back("history", p);
  }
  return pairs;
}

std::vector<Comparison> cmd_sweep(const ExperimentConfig& cfg, const fs::path& out) {
  const ModelParams params = load_params(params_path(cfg, out));
  const bool any_adaptive = std::any_of(cfg.sim.sweep.policies.begin(), cfg.sim.sweep.policies.end(),
                                        [](const std::string& p) { return policy_from_name(p).adaptive_tr; });
  const BestTrTable best_tr = any_adaptive ? load_best_tr(best_tr_path(cfg, out)) : BestTrTable{};
  const auto requests = load_workload(cfg);
  const fs::path dir = out / "sweep";

  std::vector<Comparison> rows;
  for (const auto& cond : cfg.sim.sweep.conditions) {
    std::map<std::string, Summary> by_policy;
    for (const auto& policy : cfg.sim.sweep.policies) {
      const RunOutput run = run_policy(cfg, params, best_tr, requests, policy, cond);
      const fs::path cell = dir / fmt::format("{}_{}", condition_tag(cond), policy);
      atomic_write(cell / "result.csv", result_csv(run.result));
      atomic_write(cell / "summary.json", to_json(run.summary).dump(2) + "\n");
      by_policy[policy] = run.summary;
    }
    for (const auto& [base, cand] : comparison_pairs(cfg.sim.sweep.policies))
      rows.push_back(compare(by_policy.at(base), by_policy.at(cand)));
  }
  std::ostringstream os;
  write_comparison_csv(os, rows);
  atomic_write(dir / "comparison.csv", os.str());
  write_resolved(cfg, out);
  return rows;
}

}  // namespace rrsim
