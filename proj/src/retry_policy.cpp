#include "rrsim/retry_policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace rrsim {

std::string to_string(TableShape s) { return s == TableShape::Uniform ? "uniform" : "proportional"; }

TableShape table_shape_from_string(const std::string& s) {
  if (s == "uniform") return TableShape::Uniform;
  if (s == "proportional") return TableShape::Proportional;
  throw std::invalid_argument("unknown retry table shape: " + s);
}

VrefSet RetryTable::apply(const VrefSet& base, int index) const {
  VrefSet v = base;
  const auto& off = entries.at(static_cast<std::size_t>(index));
  for (int b = 0; b < kNumBoundaries; ++b) v.mv[b] += off[b];
  return v;
}

void RetryTable::validate() const {
  if (entries.empty()) throw std::invalid_argument("retry table is empty");
  if (size() > max_steps) throw std::invalid_argument("retry table longer than max_steps");
  for (double o : entries.front())
    if (o != 0.0) throw std::invalid_argument("retry table entry 0 must be the default Vref");
  std::set<VrefOffsets> distinct(entries.begin(), entries.end());
  if (distinct.size() != entries.size()) throw std::invalid_argument("retry table entries must be distinct");
}

RetryTable build_retry_table(double step_mv, int max_steps, TableShape shape, int direction) {
  if (!(step_mv > 0.0)) throw std::invalid_argument("step_mv must be > 0");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
  if (direction != 1 && direction != -1) throw std::invalid_argument("direction must be +1 or -1");
  RetryTable t;
  t.step_mv = step_mv;
  t.max_steps = max_steps;
  t.entries.resize(static_cast<std::size_t>(max_steps));
  for (int k = 0; k < max_steps; ++k) {
    for (int b = 1; b <= kNumBoundaries; ++b) {
      const double weight =
          shape == TableShape::Uniform ? 1.0 : static_cast<double>(2 * b - 1) / (2 * kNumBoundaries - 1);
      t.entries[k][b - 1] = k == 0 ? 0.0 : direction * k * step_mv * weight;
    }
  }
  return t;
}

namespace {

struct NamedPolicy {
  const char* name;
  PolicySpec spec;
};

const std::vector<NamedPolicy>& policy_table() {
  static const std::vector<NamedPolicy> table = {
      {"baseline", {StartRule::DefaultStart, false, false}},
      {"history", {StartRule::HistoryStart, false, false}},
      {"pr2", {StartRule::DefaultStart, true, false}},
      {"ar2", {StartRule::DefaultStart, false, true}},
      {"pr2ar2", {StartRule::DefaultStart, true, true}},
      {"history_pr2", {StartRule::HistoryStart, true, false}},
      {"history_ar2", {StartRule::HistoryStart, false, true}},
      {"history_pr2ar2", {StartRule::HistoryStart, true, true}},
  };
  return table;
}

}  // namespace

PolicySpec policy_from_name(const std::string& name) {
  for (const auto& p : policy_table())
    if (name == p.name) return p.spec;
  throw std::invalid_argument("unknown policy: " + name);
}

std::string policy_name(const PolicySpec& spec) {
  for (const auto& p : policy_table())
    if (p.spec == spec) return p.name;
  return "custom";
}

const std::vector<std::string>& known_policy_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& p : policy_table()) n.emplace_back(p.name);
    return n;
  }();
  return names;
}

std::optional<int> HistoryStore::lookup(std::uint64_t group) const {
  auto it = slots_.find(group);
  if (it == slots_.end()) return std::nullopt;
  return it->second;
}

void HistoryStore::record(std::uint64_t group, int index) { slots_[group] = index; }

int history_start(const HistoryStore& history, std::uint64_t group, int table_size) {
  auto stored = history.lookup(group);
  if (!stored || *stored < 0 || *stored >= table_size) return 0;
  return *stored;
}

// ---------------------------------------------------------------------------
// BestTrTable

BestTrTable::BestTrTable(std::vector<BestTrEntry> entries) : entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    e.condition.validate();
    if (!(e.tr_scale > 0.0 && e.tr_scale <= 1.0)) throw std::invalid_argument("best tR scale must be in (0, 1]");
  }
}

std::optional<BestTrEntry> BestTrTable::find(const OperatingCondition& c) const {
  for (const auto& e : entries_)
    if (e.condition == c) return e;
  return std::nullopt;
}

double BestTrTable::lookup(const OperatingCondition& c) const {
  if (auto e = find(c)) return e->tr_scale;
  const BestTrEntry* best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& e : entries_) {
    if (e.condition.retention_days < c.retention_days || e.condition.pe_cycles < c.pe_cycles) continue;
    const double dist = (e.condition.retention_days - c.retention_days) / 365.0 +
                        static_cast<double>(e.condition.pe_cycles - c.pe_cycles) / 1000.0;
    if (dist < best_dist) {
      best_dist = dist;
      best = &e;
    }
  }
  return best ? best->tr_scale : 1.0;
}

void BestTrTable::write_csv(std::ostream& out) const {
  out << "retention_days,pe_cycles,tr_scale\n";
  for (const auto& e : entries_)
    out << fmt::format("{:g},{},{:.2f}\n", e.condition.retention_days, e.condition.pe_cycles, e.tr_scale);
}

BestTrTable BestTrTable::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "retention_days,pe_cycles,tr_scale")
    throw std::runtime_error("best-tR CSV: expected header 'retention_days,pe_cycles,tr_scale'");
  std::vector<BestTrEntry> entries;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string days, pec, tr;
    if (!std::getline(row, days, ',') || !std::getline(row, pec, ',') || !std::getline(row, tr) ||
        tr.find(',') != std::string::npos)
      throw std::runtime_error(fmt::format("best-tR CSV line {}: expected 3 fields", lineno));
    try {
      BestTrEntry e;
      e.condition = parse_condition(days + ":" + pec);
      e.tr_scale = std::stod(tr);
      entries.push_back(e);
    } catch (const std::exception& ex) {
      throw std::runtime_error(fmt::format("best-tR CSV line {}: {}", lineno, ex.what()));
    }
  }
  return BestTrTable(std::move(entries));
}

BestTrTable BestTrTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open best-tR table: " + path);
  return read_csv(in);
}

void BestTrTable::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write best-tR table: " + path);
  write_csv(out);
}

// ---------------------------------------------------------------------------
// ReadResolver

ReadResolver::ReadResolver(const ModelParams& params, const OperatingCondition& cond, RetryTable table,
                           EccConfig ecc, TimingParams timing, double adaptive_tr_scale)
    : model_(derive_distributions(params, cond)),
      default_vrefs_(default_vrefs(params)),
      inflation_exp_(params.sensing_inflation_exp),
      table_(std::move(table)),
      ecc_(ecc),
      timing_(timing),
      adaptive_tr_(adaptive_tr_scale) {
  table_.validate();
  ecc_.validate();
  timing_.validate();
  for (PageType p : kAllPageTypes) {
    auto& full = rber_full_[static_cast<int>(p)];
    auto& adaptive = rber_adaptive_[static_cast<int>(p)];
    for (int k = 0; k < table_.size(); ++k) {
      full.push_back(rber(p, k, 1.0));
      adaptive.push_back(rber(p, k, adaptive_tr_));
    }
  }
}

double ReadResolver::rber(PageType page, int table_index, double tr_scale) const {
  return page_rber(model_, page, table_.apply(default_vrefs_, table_index), tr_scale, inflation_exp_);
}

RetryTrace ReadResolver::walk(int start, double tr_scale, bool pipelined, PageType page, Rng& rng) const {
  const int n = table_.size();
  std::vector<double> scratch;
  const std::vector<double>* row = nullptr;
  if (tr_scale == 1.0) {
    row = &rber_full_[static_cast<int>(page)];
  } else if (tr_scale == adaptive_tr_) {
    row = &rber_adaptive_[static_cast<int>(page)];
  } else {
    for (int k = 0; k < n; ++k) scratch.push_back(rber(page, k, tr_scale));
    row = &scratch;
  }

  RetryTrace trace;
  trace.tr_scale_used = tr_scale;
  for (int i = 0; i < n; ++i) {
    const int index = (start + i) % n;
    const double r = (*row)[static_cast<std::size_t>(index)];
    const DecodeResult d = decode(realize_errors(r, ecc_, rng), ecc_);
    trace.steps.push_back({index, r, d.margin});
    if (d.success) {
      trace.success = true;
      break;
    }
  }
  trace.n_steps = static_cast<int>(trace.steps.size());
  trace.more_entries = trace.n_steps < n;
  trace.latency_us = pipelined ? latency_pipelined(trace.n_steps, timing_, tr_scale)
                               : latency_sequential(trace.n_steps, timing_, tr_scale);
  return trace;
}

RetryTrace ReadResolver::resolve(const PolicySpec& policy, PageType page, std::uint64_t group,
                                 HistoryStore& history, Rng& rng) const {
  const int start =
      policy.start_rule == StartRule::HistoryStart ? history_start(history, group, table_.size()) : 0;
  const double tr = policy.adaptive_tr ? adaptive_tr_ : 1.0;
  RetryTrace trace = walk(start, tr, policy.pipelined, page, rng);
  if (trace.success && policy.start_rule == StartRule::HistoryStart)
    history.record(group, trace.steps.back().table_index);
  return trace;
}

RetryTrace ReadResolver::resolve_at(double tr_scale, PageType page, Rng& rng) const {
  return walk(0, tr_scale, false, page, rng);
}

RetryTrace resolve_read(const ModelParams& params, const OperatingCondition& cond, const RetryTable& table,
                        const PolicySpec& policy, PageType page, const EccConfig& ecc, const TimingParams& timing,
                        const BestTrTable& best_tr, std::uint64_t group, HistoryStore& history, Rng& rng) {
  const double tr = policy.adaptive_tr ? best_tr.lookup(cond) : 1.0;
  ReadResolver resolver(params, cond, table, ecc, timing, tr);
  return resolver.resolve(policy, page, group, history, rng);
}

// ---------------------------------------------------------------------------
// Characterization

std::vector<double> default_tr_grid() {
  std::vector<double> g;
  for (int i = 20; i >= 1; --i) g.push_back(i * 5 / 100.0);
  return g;
}

std::vector<OperatingCondition> default_condition_grid() {
  std::vector<OperatingCondition> grid;
  for (double days : {0.0, 30.0, 90.0, 180.0, 365.0})
    for (std::int64_t pec : {0, 500, 1000, 1500}) grid.push_back({days, pec});
  return grid;
}

BestTrEntry characterize_condition(const ModelParams& params, const OperatingCondition& cond,
                                   const RetryTable& table, const EccConfig& ecc, const std::vector<double>& tr_grid) {
  if (!ecc.deterministic_mode || ecc.guardband_sigmas < kMinCharacterizationGuardband)
    throw std::invalid_argument("characterization requires deterministic ECC with guardband_sigmas >= 6");
  if (tr_grid.empty() || tr_grid.front() != 1.0) throw std::invalid_argument("tR grid must start at 1.0");
  for (std::size_t i = 1; i < tr_grid.size(); ++i)
    if (!(tr_grid[i] < tr_grid[i - 1] && tr_grid[i] > 0.0))
      throw std::invalid_argument("tR grid must be strictly descending within (0, 1]");

  const CellStateModel model = derive_distributions(params, cond);
  ReadResolver resolver(params, cond, table, ecc, TimingParams{});
  Rng unused(0);

  auto final_step_ok = [&](double tr) {
    const VrefSet opt = optimal_vref(model, tr, params.sensing_inflation_exp);
    for (PageType p : kAllPageTypes) {
      const double r = page_rber(model, p, opt, tr, params.sensing_inflation_exp);
      if (!decode(realize_errors(r, ecc, unused), ecc).success) return false;
    }
    return true;
  };

  // The reference walk uses the minimum guardband, so a stricter guardband can only
  // lengthen the reduced-tR walk and never admits more reduction.
  EccConfig ref_ecc = ecc;
  ref_ecc.guardband_sigmas = kMinCharacterizationGuardband;
  const ReadResolver reference(params, cond, table, ref_ecc, TimingParams{});
  std::array<int, 3> full_steps{};
  for (PageType p : kAllPageTypes) full_steps[static_cast<int>(p)] = reference.resolve_at(1.0, p, unused).n_steps;
  auto same_steps = [&](double tr) {
    for (PageType p : kAllPageTypes)
      if (resolver.resolve_at(tr, p, unused).n_steps != full_steps[static_cast<int>(p)]) return false;
    return true;
  };

  BestTrEntry entry{cond, 1.0, false};
  if (!final_step_ok(1.0)) {
    entry.beyond_ecc = true;
    return entry;
  }
  for (double tr : tr_grid) {
    if (!final_step_ok(tr) || !same_steps(tr)) break;
    entry.tr_scale = tr;
  }
  return entry;
}

BestTrTable characterize_best_tr(const ModelParams& params, const std::vector<OperatingCondition>& conditions,
                                 const RetryTable& table, const EccConfig& ecc, const std::vector<double>& tr_grid) {
  std::vector<BestTrEntry> entries;
  entries.reserve(conditions.size());
  for (const auto& c : conditions) entries.push_back(characterize_condition(params, c, table, ecc, tr_grid));
  return BestTrTable(std::move(entries));
}

}  // namespace rrsim
