#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace rrsim {

inline constexpr int kNumStates = 8;
inline constexpr int kNumBoundaries = 7;

enum class PageType { LSB = 0, CSB = 1, MSB = 2 };

inline constexpr std::array<PageType, 3> kAllPageTypes = {PageType::LSB, PageType::CSB,
                                                          PageType::MSB};

std::string to_string(PageType p);
PageType page_type_from_string(const std::string& s);

struct OperatingCondition {
  double retention_days = 0.0;
  std::int64_t pe_cycles = 0;

  void validate() const;
  friend bool operator==(const OperatingCondition&, const OperatingCondition&) = default;
};

/// Parses "<days>:<pec>", e.g. "365:1500".
OperatingCondition parse_condition(const std::string& text);
std::string to_string(const OperatingCondition& c);

struct StateDistribution {
  double mean_mv = 0.0;
  double stdev_mv = 1.0;
};

/// Boundary indices are 1-based (boundary b separates state b-1 from state b).
struct PageLevels {
  std::array<std::vector<int>, 3> boundaries = {std::vector<int>{1, 5}, std::vector<int>{2, 4, 6},
                                                std::vector<int>{3, 7}};

  const std::vector<int>& of(PageType p) const { return boundaries[static_cast<int>(p)]; }
};

struct VrefSet {
  std::array<double, kNumBoundaries> mv{};

  double at(int boundary) const { return mv[boundary - 1]; }
  void validate() const;
};

/// Threshold-voltage distributions of a TLC cell under one operating condition.
class CellStateModel {
 public:
  CellStateModel(std::array<StateDistribution, kNumStates> states, PageLevels levels = {});

  const std::array<StateDistribution, kNumStates>& states() const { return states_; }
  const StateDistribution& state(int i) const { return states_[i]; }
  const PageLevels& page_levels() const { return levels_; }
  /// 3-bit pattern per state; bit 0 = LSB, bit 1 = CSB, bit 2 = MSB.
  const std::array<std::uint8_t, kNumStates>& gray_map() const { return gray_; }

 private:
  std::array<StateDistribution, kNumStates> states_;
  PageLevels levels_;
  std::array<std::uint8_t, kNumStates> gray_{};
};

/// Gray map induced by the page boundary split; throws if it is not a valid Gray code.
std::array<std::uint8_t, kNumStates> gray_map_from_levels(const PageLevels& levels);

struct ModelParams {
  std::array<StateDistribution, kNumStates> base_states = default_base_states();
  double retention_coeff = 60.0;     // mV per ln-day unit
  double retention_ref_age = 1.0;    // days
  double pec_widen_coeff = 0.04;     // per 1000 P/E cycles
  double sensing_inflation_exp = 0.35;
  PageLevels page_levels{};

  void validate() const;

  static std::array<StateDistribution, kNumStates> default_base_states();
};

CellStateModel derive_distributions(const ModelParams& params, const OperatingCondition& cond);

/// Stdev multiplier applied when sensing with a shortened tR.
double sensing_inflation(double tr_scale, double inflation_exp);

double boundary_misread_prob(const CellStateModel& model, int boundary, double vref_mv,
                             double tr_scale, double inflation_exp);

double page_rber(const CellStateModel& model, PageType page, const VrefSet& vrefs,
                 double tr_scale, double inflation_exp);

VrefSet optimal_vref(const CellStateModel& model, double tr_scale, double inflation_exp);

/// Read-reference voltages at the midpoints of the zero-age state means.
VrefSet default_vrefs(const ModelParams& params);

double normal_cdf(double x);

}  // namespace rrsim
