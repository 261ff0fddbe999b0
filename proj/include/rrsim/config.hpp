#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rrsim/calibration.hpp"
#include "rrsim/ecc_model.hpp"
#include "rrsim/flash_timing.hpp"
#include "rrsim/nand_model.hpp"
#include "rrsim/retry_policy.hpp"
#include "rrsim/ssd_sim.hpp"
#include "rrsim/workload.hpp"

namespace rrsim {

struct RetryConfig {
  double step_mv = 40.0;
  int max_steps = 16;
  TableShape shape = TableShape::Proportional;
  int direction = -1;
  int history_group_blocks = 256;
  double characterize_guardband_sigmas = 6.0;
  std::vector<OperatingCondition> conditions = default_condition_grid();
  std::vector<double> tr_grid = default_tr_grid();

  RetryTable table() const { return build_retry_table(step_mv, max_steps, shape, direction); }
};

struct WorkloadConfig {
  std::string preset = "read90";  // empty when a trace or explicit spec is used
  std::string trace;              // path to a trace CSV; overrides the synthetic spec
  SynthSpec synth = workload_preset("read90");
};

struct SweepConfig {
  std::vector<OperatingCondition> conditions = {{90.0, 0}, {180.0, 1000}, {365.0, 1500}};
  std::vector<std::string> policies = {"baseline", "history", "pr2", "ar2", "pr2ar2", "history_pr2ar2"};
};

struct SimSection {
  std::string policy = "baseline";
  OperatingCondition condition{365.0, 1500};
  std::uint64_t seed = 1;
  std::string params_file;   // default: <out>/params.json
  std::string best_tr_file;  // default: <out>/best_tr.csv
  SweepConfig sweep;
};

struct ExperimentConfig {
  ModelParams model;
  CalibrationTargets calibration;
  EccConfig ecc;
  TimingParams timing;
  Geometry geometry;
  RetryConfig retry;
  WorkloadConfig workload;
  SimSection sim;

  void validate() const;
};

/// Strict: unknown keys anywhere are an error. Missing keys take defaults.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
/// Fully materialized (every default written out).
nlohmann::json to_json(const ExperimentConfig& c);

nlohmann::json model_to_json(const ModelParams& m);
ModelParams model_from_json(const nlohmann::json& j, const ModelParams& defaults = {});

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace rrsim
