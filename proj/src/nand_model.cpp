#include "rrsim/nand_model.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace rrsim {

std::string to_string(PageType p) {
  switch (p) {
    case PageType::LSB: return "LSB";
    case PageType::CSB: return "CSB";
    case PageType::MSB: return "MSB";
  }
  return "?";
}

PageType page_type_from_string(const std::string& s) {
  if (s == "LSB" || s == "lsb") return PageType::LSB;
  if (s == "CSB" || s == "csb") return PageType::CSB;
  if (s == "MSB" || s == "msb") return PageType::MSB;
  throw std::invalid_argument("unknown page type: " + s);
}

void OperatingCondition::validate() const {
  if (!(retention_days >= 0.0) || !std::isfinite(retention_days))
    throw std::invalid_argument("retention age must be a finite value >= 0");
  if (pe_cycles < 0) throw std::invalid_argument("P/E cycles must be >= 0");
}

OperatingCondition parse_condition(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("condition must be <days>:<pec>, got '" + text + "'");
  OperatingCondition c;
  try {
    std::size_t used = 0;
    const std::string days = text.substr(0, colon);
    const std::string pec = text.substr(colon + 1);
    c.retention_days = std::stod(days, &used);
    if (used != days.size()) throw std::invalid_argument("trailing characters");
    c.pe_cycles = std::stoll(pec, &used);
    if (used != pec.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw std::invalid_argument("condition must be <days>:<pec>, got '" + text + "'");
  }
  c.validate();
  return c;
}

std::string to_string(const OperatingCondition& c) {
  return fmt::format("{:g}:{}", c.retention_days, c.pe_cycles);
}

void VrefSet::validate() const {
  for (int b = 1; b < kNumBoundaries; ++b)
    if (!(mv[b] > mv[b - 1])) throw std::invalid_argument("Vref boundaries must be strictly increasing");
}

std::array<std::uint8_t, kNumStates> gray_map_from_levels(const PageLevels& levels) {
  std::array<int, kNumBoundaries + 1> owner{};
  owner.fill(-1);
  for (int p = 0; p < 3; ++p) {
    for (int b : levels.boundaries[p]) {
      if (b < 1 || b > kNumBoundaries) throw std::invalid_argument("page boundary index out of range");
      if (owner[b] != -1) throw std::invalid_argument("page boundary sets must be disjoint");
      owner[b] = p;
    }
  }
  for (int b = 1; b <= kNumBoundaries; ++b)
    if (owner[b] == -1) throw std::invalid_argument("page boundary sets must cover all 7 boundaries");

  // Erase state reads as all ones; crossing a boundary flips the owning page's bit.
  std::array<std::uint8_t, kNumStates> gray{};
  gray[0] = 0b111;
  for (int s = 1; s < kNumStates; ++s) gray[s] = gray[s - 1] ^ static_cast<std::uint8_t>(1u << owner[s]);

  std::array<bool, kNumStates> seen{};
  for (auto g : gray) {
    if (seen[g]) throw std::invalid_argument("page boundary split does not yield a bijective Gray map");
    seen[g] = true;
  }
  return gray;
}

CellStateModel::CellStateModel(std::array<StateDistribution, kNumStates> states, PageLevels levels)
    : states_(states), levels_(std::move(levels)), gray_(gray_map_from_levels(levels_)) {
  for (int i = 0; i < kNumStates; ++i) {
    if (!(states_[i].stdev_mv > 0.0)) throw std::invalid_argument("state stdev must be > 0");
    if (i > 0 && !(states_[i].mean_mv > states_[i - 1].mean_mv))
      throw std::invalid_argument("state means must be strictly increasing");
  }
}

std::array<StateDistribution, kNumStates> ModelParams::default_base_states() {
  std::array<StateDistribution, kNumStates> s{};
  for (int i = 0; i < kNumStates; ++i) s[i] = {500.0 * i, 70.0};
  return s;
}

void ModelParams::validate() const {
  if (!(retention_ref_age > 0.0)) throw std::invalid_argument("retention_ref_age must be > 0");
  if (!(pec_widen_coeff >= 0.0)) throw std::invalid_argument("pec_widen_coeff must be >= 0");
  if (!(sensing_inflation_exp >= 0.0)) throw std::invalid_argument("sensing_inflation_exp must be >= 0");
  if (!std::isfinite(retention_coeff)) throw std::invalid_argument("retention_coeff must be finite");
  CellStateModel(base_states, page_levels);
}

CellStateModel derive_distributions(const ModelParams& params, const OperatingCondition& cond) {
  params.validate();
  cond.validate();
  const double log_age = std::log1p(cond.retention_days / params.retention_ref_age);
  const double widen = 1.0 + params.pec_widen_coeff * static_cast<double>(cond.pe_cycles) / 1000.0;

  std::array<StateDistribution, kNumStates> states = params.base_states;
  for (int i = 0; i < kNumStates; ++i) {
    const double weight = static_cast<double>(i) / (kNumStates - 1);
    states[i].mean_mv -= params.retention_coeff * weight * log_age;
    states[i].stdev_mv *= widen;
  }
  for (int i = 1; i < kNumStates; ++i) {
    if (!(states[i].mean_mv > states[i - 1].mean_mv))
      throw std::domain_error(fmt::format("model out of validity range at {}: shifted state means overlap",
                                          to_string(cond)));
  }
  return CellStateModel(states, params.page_levels);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double sensing_inflation(double tr_scale, double inflation_exp) {
  if (!(tr_scale > 0.0 && tr_scale <= 1.0)) throw std::invalid_argument("tr_scale must be in (0, 1]");
  return std::pow(tr_scale, -inflation_exp);
}

double boundary_misread_prob(const CellStateModel& model, int boundary, double vref_mv,
                             double tr_scale, double inflation_exp) {
  if (boundary < 1 || boundary > kNumBoundaries) throw std::invalid_argument("boundary index must be in 1..7");
  if (!std::isfinite(vref_mv)) throw std::invalid_argument("vref must be finite");
  const double inflate = sensing_inflation(tr_scale, inflation_exp);
  const auto& below = model.state(boundary - 1);
  const auto& above = model.state(boundary);
  const double p_below_high = normal_cdf(-(vref_mv - below.mean_mv) / (below.stdev_mv * inflate));
  const double p_above_low = normal_cdf((vref_mv - above.mean_mv) / (above.stdev_mv * inflate));
  return (p_below_high + p_above_low) / kNumStates;
}

double page_rber(const CellStateModel& model, PageType page, const VrefSet& vrefs, double tr_scale,
                 double inflation_exp) {
  double rber = 0.0;
  for (int b : model.page_levels().of(page))
    rber += boundary_misread_prob(model, b, vrefs.at(b), tr_scale, inflation_exp);
  return rber;
}

VrefSet optimal_vref(const CellStateModel& model, double tr_scale, double inflation_exp) {
  constexpr double kTolMv = 0.1;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  VrefSet out;
  for (int b = 1; b <= kNumBoundaries; ++b) {
    auto f = [&](double v) { return boundary_misread_prob(model, b, v, tr_scale, inflation_exp); };
    double lo = model.state(b - 1).mean_mv;
    double hi = model.state(b).mean_mv;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > kTolMv / 2.0) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = f(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = f(x2);
      }
    }
    out.mv[b - 1] = 0.5 * (lo + hi);
  }
  return out;
}

VrefSet default_vrefs(const ModelParams& params) {
  VrefSet v;
  for (int b = 1; b <= kNumBoundaries; ++b)
    v.mv[b - 1] = 0.5 * (params.base_states[b - 1].mean_mv + params.base_states[b].mean_mv);
  return v;
}

}  // namespace rrsim
