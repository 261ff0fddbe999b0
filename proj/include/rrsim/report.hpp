#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rrsim/ssd_sim.hpp"

namespace rrsim {

struct RunMeta {
  std::string policy;
  OperatingCondition condition;
  std::uint64_t seed = 0;
  std::uint64_t workload_hash = 0;
  std::uint64_t config_hash = 0;
};

struct Summary {
  RunMeta meta;
  std::uint64_t requests = 0;       // accepted requests
  std::uint64_t latency_samples = 0;  // correctable requests used for latency stats
  double mean_us = 0.0;
  double median_us = 0.0;
  double p99_us = 0.0;
  double mean_retry_steps = 0.0;  // per page read
  std::uint64_t page_reads = 0;
  std::uint64_t uncorrectable_reads = 0;
  std::uint64_t uncorrectable_requests = 0;
  std::uint64_t rejected = 0;
  double throughput_rps = 0.0;
};

/// Nearest-rank percentile, p in (0, 100].
double percentile(std::vector<double> values, double p);

/// Latency statistics exclude uncorrectable requests. Throws on an empty result.
Summary aggregate(const SimResult& result, const RunMeta& meta);

struct Comparison {
  std::string baseline;
  std::string candidate;
  OperatingCondition condition;
  double baseline_mean_us = 0.0;
  double candidate_mean_us = 0.0;
  double mean_reduction_pct = 0.0;
  double median_reduction_pct = 0.0;
  double p99_reduction_pct = 0.0;
  double baseline_retry_steps = 0.0;
  double candidate_retry_steps = 0.0;
};

/// Requires the same workload, condition and seed.
Comparison compare(const Summary& baseline, const Summary& candidate);

nlohmann::json to_json(const Summary& s);
Summary summary_from_json(const nlohmann::json& j);
Summary load_summary(const std::string& path);

nlohmann::json to_json(const Comparison& c);
void write_comparison_csv(std::ostream& out, const std::vector<Comparison>& rows);

std::string hex64(std::uint64_t v);

}  // namespace rrsim
