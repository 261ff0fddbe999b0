#include "rrsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace rrsim {

using nlohmann::json;

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty sample");
  if (!(p > 0.0 && p <= 100.0)) throw std::invalid_argument("percentile must be in (0, 100]");
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

Summary aggregate(const SimResult& result, const RunMeta& meta) {
  if (result.requests.empty()) throw std::invalid_argument("cannot summarize an empty simulation result");
  Summary s;
  s.meta = meta;
  s.requests = result.requests.size();
  s.page_reads = result.page_reads;
  s.uncorrectable_reads = result.uncorrectable_reads;
  s.uncorrectable_requests = result.uncorrectable_requests;
  s.rejected = result.rejected;
  s.mean_retry_steps =
      result.page_reads ? static_cast<double>(result.retry_steps) / static_cast<double>(result.page_reads) : 0.0;

  std::vector<double> lat;
  lat.reserve(result.requests.size());
  double first_arrival = std::numeric_limits<double>::infinity();
  double last_completion = 0.0;
  double sum = 0.0;
  for (const auto& r : result.requests) {
    first_arrival = std::min(first_arrival, r.arrival_us);
    last_completion = std::max(last_completion, r.completion_us);
    if (r.uncorrectable) continue;
    lat.push_back(r.response_us());
    sum += r.response_us();
  }
  if (lat.empty()) throw std::invalid_argument("every request was uncorrectable; no latency statistics");
  s.latency_samples = lat.size();
  s.mean_us = sum / static_cast<double>(lat.size());
  s.median_us = percentile(lat, 50.0);
  s.p99_us = percentile(lat, 99.0);
  const double span = last_completion - first_arrival;
  s.throughput_rps = span > 0.0 ? static_cast<double>(lat.size()) / span * 1e6 : 0.0;
  return s;
}

namespace {

double reduction(double base, double cand) { return base > 0.0 ? 100.0 * (base - cand) / base : 0.0; }

}  // namespace

Comparison compare(const Summary& baseline, const Summary& candidate) {
  if (baseline.meta.workload_hash != candidate.meta.workload_hash)
    throw std::invalid_argument("compare: summaries come from different workloads");
  if (!(baseline.meta.condition == candidate.meta.condition))
    throw std::invalid_argument("compare: summaries come from different operating conditions");
  if (baseline.meta.seed != candidate.meta.seed) throw std::invalid_argument("compare: summaries use different seeds");
  Comparison c;
  c.baseline = baseline.meta.policy;
  c.candidate = candidate.meta.policy;
  c.condition = baseline.meta.condition;
  c.baseline_mean_us = baseline.mean_us;
  c.candidate_mean_us = candidate.mean_us;
  c.mean_reduction_pct = reduction(baseline.mean_us, candidate.mean_us);
  c.median_reduction_pct = reduction(baseline.median_us, candidate.median_us);
  c.p99_reduction_pct = reduction(baseline.p99_us, candidate.p99_us);
  c.baseline_retry_steps = baseline.mean_retry_steps;
  c.candidate_retry_steps = candidate.mean_retry_steps;
  return c;
}

json to_json(const Summary& s) {
  return {{"policy", s.meta.policy},
          {"condition", to_string(s.meta.condition)},
          {"seed", s.meta.seed},
          {"workload_hash", hex64(s.meta.workload_hash)},
          {"config_hash", hex64(s.meta.config_hash)},
          {"requests", s.requests},
          {"latency_samples", s.latency_samples},
          {"mean_us", s.mean_us},
          {"median_us", s.median_us},
          {"p99_us", s.p99_us},
          {"mean_retry_steps", s.mean_retry_steps},
          {"page_reads", s.page_reads},
          {"uncorrectable_reads", s.uncorrectable_reads},
          {"uncorrectable_requests", s.uncorrectable_requests},
          {"rejected", s.rejected},
          {"throughput_rps", s.throughput_rps}};
}

Summary summary_from_json(const json& j) {
  try {
    Summary s;
    s.meta.policy = j.at("policy").get<std::string>();
    s.meta.condition = parse_condition(j.at("condition").get<std::string>());
    s.meta.seed = j.at("seed").get<std::uint64_t>();
    s.meta.workload_hash = std::stoull(j.at("workload_hash").get<std::string>(), nullptr, 16);
    s.meta.config_hash = std::stoull(j.at("config_hash").get<std::string>(), nullptr, 16);
    s.requests = j.at("requests").get<std::uint64_t>();
    s.latency_samples = j.at("latency_samples").get<std::uint64_t>();
    s.mean_us = j.at("mean_us").get<double>();
    s.median_us = j.at("median_us").get<double>();
    s.p99_us = j.at("p99_us").get<double>();
    s.mean_retry_steps = j.at("mean_retry_steps").get<double>();
    s.page_reads = j.at("page_reads").get<std::uint64_t>();
    s.uncorrectable_reads = j.at("uncorrectable_reads").get<std::uint64_t>();
    s.uncorrectable_requests = j.at("uncorrectable_requests").get<std::uint64_t>();
    s.rejected = j.at("rejected").get<std::uint64_t>();
    s.throughput_rps = j.at("throughput_rps").get<double>();
    return s;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed summary: ") + e.what());
  }
}

Summary load_summary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open summary: " + path);
  try {
    return summary_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(fmt::format("summary {}: {}", path, e.what()));
  }
}

json to_json(const Comparison& c) {
  return {{"baseline", c.baseline},
          {"candidate", c.candidate},
          {"condition", to_string(c.condition)},
          {"baseline_mean_us", c.baseline_mean_us},
          {"candidate_mean_us", c.candidate_mean_us},
          {"mean_reduction_pct", c.mean_reduction_pct},
          {"median_reduction_pct", c.median_reduction_pct},
          {"p99_reduction_pct", c.p99_reduction_pct},
          {"baseline_retry_steps", c.baseline_retry_steps},
          {"candidate_retry_steps", c.candidate_retry_steps}};
}

void write_comparison_csv(std::ostream& out, const std::vector<Comparison>& rows) {
  out << "condition,baseline,candidate,baseline_mean_us,candidate_mean_us,mean_reduction_pct,"
         "median_reduction_pct,p99_reduction_pct,baseline_retry_steps,candidate_retry_steps\n";
  for (const auto& c : rows)
    out << fmt::format("{},{},{},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f},{:.4f},{:.4f}\n", to_string(c.condition),
                       c.baseline, c.candidate, c.baseline_mean_us, c.candidate_mean_us, c.mean_reduction_pct,
                       c.median_reduction_pct, c.p99_reduction_pct, c.baseline_retry_steps, c.candidate_retry_steps);
}

}  // namespace rrsim
