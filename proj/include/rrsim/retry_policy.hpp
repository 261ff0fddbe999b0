#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rrsim/ecc_model.hpp"
#include "rrsim/flash_timing.hpp"
#include "rrsim/nand_model.hpp"

namespace rrsim {

enum class TableShape { Uniform, Proportional };

std::string to_string(TableShape s);
TableShape table_shape_from_string(const std::string& s);

using VrefOffsets = std::array<double, kNumBoundaries>;

struct RetryTable {
  std::vector<VrefOffsets> entries;
  double step_mv = 40.0;
  int max_steps = 16;

  int size() const { return static_cast<int>(entries.size()); }
  VrefSet apply(const VrefSet& base, int index) const;
  void validate() const;
};

/// Entry k moves boundary b by direction * k * step_mv * weight_b.
/// Uniform: weight 1. Proportional: weight (2b-1)/13, so the top boundary moves a full
/// step per entry and lower boundaries follow the retention shift of their midpoints.
RetryTable build_retry_table(double step_mv, int max_steps, TableShape shape = TableShape::Proportional,
                             int direction = -1);

enum class StartRule { DefaultStart, HistoryStart };

struct PolicySpec {
  StartRule start_rule = StartRule::DefaultStart;
  bool pipelined = false;
  bool adaptive_tr = false;

  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

/// baseline, history, pr2, ar2, pr2ar2, history_pr2, history_ar2, history_pr2ar2
PolicySpec policy_from_name(const std::string& name);
std::string policy_name(const PolicySpec& p);
const std::vector<std::string>& known_policy_names();

/// Last successful retry-table index per page group.
class HistoryStore {
 public:
  std::optional<int> lookup(std::uint64_t group) const;
  void record(std::uint64_t group, int index);
  std::size_t size() const { return slots_.size(); }

 private:
  std::unordered_map<std::uint64_t, int> slots_;
};

int history_start(const HistoryStore& history, std::uint64_t group, int table_size);

struct RetryStep {
  int table_index = 0;
  double rber = 0.0;
  int margin = 0;
};

struct RetryTrace {
  std::vector<RetryStep> steps;
  bool success = false;
  int n_steps = 0;
  double latency_us = 0.0;
  double tr_scale_used = 1.0;
  bool more_entries = false;  // an untried table entry remained after the last step
};

struct BestTrEntry {
  OperatingCondition condition;
  double tr_scale = 1.0;
  bool beyond_ecc = false;
};

class BestTrTable {
 public:
  BestTrTable() = default;
  explicit BestTrTable(std::vector<BestTrEntry> entries);

  const std::vector<BestTrEntry>& entries() const { return entries_; }
  std::optional<BestTrEntry> find(const OperatingCondition& c) const;
  /// Exact grid match, else the nearest grid point at least as harsh in age and P/E, else 1.0.
  double lookup(const OperatingCondition& c) const;

  void write_csv(std::ostream& out) const;
  static BestTrTable read_csv(std::istream& in);
  static BestTrTable load(const std::string& path);
  void save(const std::string& path) const;

 private:
  std::vector<BestTrEntry> entries_;
};

/// Everything needed to resolve reads at one operating condition. RBERs along the table
/// are precomputed, so resolving a read costs only the ECC realizations.
class ReadResolver {
 public:
  ReadResolver(const ModelParams& params, const OperatingCondition& cond, RetryTable table, EccConfig ecc,
               TimingParams timing, double adaptive_tr_scale = 1.0);

  RetryTrace resolve(const PolicySpec& policy, PageType page, std::uint64_t group, HistoryStore& history,
                     Rng& rng) const;
  /// Like resolve() but at an explicit tR scale with the default start.
  RetryTrace resolve_at(double tr_scale, PageType page, Rng& rng) const;

  double rber(PageType page, int table_index, double tr_scale) const;
  const CellStateModel& model() const { return model_; }
  const RetryTable& table() const { return table_; }
  const EccConfig& ecc() const { return ecc_; }
  double adaptive_tr_scale() const { return adaptive_tr_; }

 private:
  RetryTrace walk(int start, double tr_scale, bool pipelined, PageType page, Rng& rng) const;
  const std::vector<double>& rber_row(PageType page, double tr_scale) const;

  CellStateModel model_;
  VrefSet default_vrefs_;
  double inflation_exp_;
  RetryTable table_;
  EccConfig ecc_;
  TimingParams timing_;
  double adaptive_tr_;
  std::array<std::vector<double>, 3> rber_full_;
  std::array<std::vector<double>, 3> rber_adaptive_;
};

RetryTrace resolve_read(const ModelParams& params, const OperatingCondition& cond, const RetryTable& table,
                        const PolicySpec& policy, PageType page, const EccConfig& ecc, const TimingParams& timing,
                        const BestTrTable& best_tr, std::uint64_t group, HistoryStore& history, Rng& rng);

inline constexpr double kMinCharacterizationGuardband = 6.0;

/// 1.00, 0.95, ..., 0.05.
std::vector<double> default_tr_grid();
std::vector<OperatingCondition> default_condition_grid();

BestTrTable characterize_best_tr(const ModelParams& params, const std::vector<OperatingCondition>& conditions,
                                 const RetryTable& table, const EccConfig& ecc,
                                 const std::vector<double>& tr_grid = default_tr_grid());

/// Safe tR scale for one condition (characterization of a single grid point).
BestTrEntry characterize_condition(const ModelParams& params, const OperatingCondition& cond,
                                   const RetryTable& table, const EccConfig& ecc, const std::vector<double>& tr_grid);

}  // namespace rrsim
