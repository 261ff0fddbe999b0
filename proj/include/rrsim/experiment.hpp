#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrsim/config.hpp"
#include "rrsim/report.hpp"

namespace rrsim {

/// A required artifact from an earlier subcommand is missing.
class PrerequisiteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes via a temporary sibling and rename, so readers never see a partial file.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

std::vector<Request> load_workload(const ExperimentConfig& cfg);
std::uint64_t workload_hash(const std::vector<Request>& requests);
std::uint64_t config_hash(const ExperimentConfig& cfg);

std::filesystem::path params_path(const ExperimentConfig& cfg, const std::filesystem::path& out);
std::filesystem::path best_tr_path(const ExperimentConfig& cfg, const std::filesystem::path& out);

void save_params(const std::filesystem::path& path, const ModelParams& params);
/// Throws PrerequisiteError naming `calibrate` when the file does not exist.
ModelParams load_params(const std::filesystem::path& path);
/// Throws PrerequisiteError naming `characterize` when the file does not exist.
BestTrTable load_best_tr(const std::filesystem::path& path);

EccConfig characterization_ecc(const ExperimentConfig& cfg);

SimConfig make_sim_config(const ExperimentConfig& cfg, const ModelParams& params, const BestTrTable& best_tr,
                          const std::string& policy, const OperatingCondition& cond);

struct RunOutput {
  SimResult result;
  Summary summary;
};

RunOutput run_policy(const ExperimentConfig& cfg, const ModelParams& params, const BestTrTable& best_tr,
                     const std::vector<Request>& requests, const std::string& policy, const OperatingCondition& cond);

// Subcommands. Each writes its artifacts under `out` and the resolved config.
CalibrationResult cmd_calibrate(const ExperimentConfig& cfg, const std::filesystem::path& out);
BestTrTable cmd_characterize(const ExperimentConfig& cfg, const std::filesystem::path& out);
Summary cmd_run(const ExperimentConfig& cfg, const std::filesystem::path& out);
std::vector<Comparison> cmd_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out);

/// Pairs each candidate with the plain baseline, and HistoryStart variants also with HistoryStart.
std::vector<std::pair<std::string, std::string>> comparison_pairs(const std::vector<std::string>& policies);

std::string condition_tag(const OperatingCondition& c);

}  // namespace rrsim
