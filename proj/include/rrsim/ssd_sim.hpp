#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rrsim/ecc_model.hpp"
#include "rrsim/flash_timing.hpp"
#include "rrsim/nand_model.hpp"
#include "rrsim/retry_policy.hpp"
#include "rrsim/workload.hpp"

namespace rrsim {

struct Geometry {
  int channels = 8;
  int chips_per_channel = 4;
  int dies_per_chip = 2;
  int page_size_kib = 16;
  int pages_per_block = 384;
  int blocks_per_die = 1024;

  void validate() const;
  int total_dies() const { return channels * chips_per_channel * dies_per_chip; }
  std::uint64_t total_pages() const;
  std::uint64_t blocks_per_page() const { return static_cast<std::uint64_t>(page_size_kib / 4); }
  std::uint64_t capacity_blocks() const { return total_pages() * blocks_per_page(); }
};

struct PhysicalAddress {
  int channel = 0;
  int chip = 0;
  int die = 0;
  int block = 0;
  int page = 0;
  PageType page_type = PageType::LSB;

  int die_index(const Geometry& g) const { return (channel * g.chips_per_channel + chip) * g.dies_per_chip + die; }
  friend bool operator==(const PhysicalAddress&, const PhysicalAddress&) = default;
};

/// Static striping of logical pages: channel first, then chip, then die, then page
/// within the die. Returns nullopt beyond capacity.
std::optional<PhysicalAddress> map_lba(std::uint64_t logical_page, const Geometry& g);

struct SimConfig {
  ModelParams model;
  EccConfig ecc;
  TimingParams timing;
  Geometry geometry;
  RetryTable table = build_retry_table(40.0, 16);
  PolicySpec policy;
  OperatingCondition condition{365.0, 1500};
  std::uint64_t seed = 1;
  double adaptive_tr_scale = 1.0;  // looked up from the best-tR table by the caller
  int history_group_blocks = 256;

  /// Test hook: replaces retry resolution for every page read.
  std::function<RetryTrace(const PhysicalAddress&, std::uint64_t op_index)> trace_override;
};

struct RequestRecord {
  double arrival_us = 0.0;
  double completion_us = 0.0;
  OpKind op = OpKind::Read;
  int n_pages = 0;
  int n_page_reads = 0;
  int total_retry_steps = 0;
  bool uncorrectable = false;

  double response_us() const { return completion_us - arrival_us; }
};

struct SimResult {
  std::vector<RequestRecord> requests;  // accepted requests, arrival order
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t page_reads = 0;
  std::uint64_t retry_steps = 0;
  std::uint64_t uncorrectable_reads = 0;     // page reads that exhausted the table
  std::uint64_t uncorrectable_requests = 0;
  std::uint64_t rejected = 0;                // out-of-capacity requests
  std::uint64_t seed = 0;
  std::string config_echo;

  /// arrival_us,completion_us,response_us,pages,retry_steps
  void write_csv(std::ostream& out) const;
};

SimResult simulate(const std::vector<Request>& requests, const SimConfig& config);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace rrsim
