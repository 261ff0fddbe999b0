#pragma once

#include <vector>

#include "rrsim/ecc_model.hpp"
#include "rrsim/nand_model.hpp"
#include "rrsim/retry_policy.hpp"

namespace rrsim {

struct CalibrationTargets {
  OperatingCondition steps_condition{90.0, 0};
  double mean_retry_steps = 4.5;
  double steps_tolerance = 0.25;
  OperatingCondition tr_condition{365.0, 1500};
  double tr_reduction = 0.25;
  int max_evaluations = 200;
};

struct CalibrationResult {
  ModelParams params;
  bool converged = false;
  int evaluations = 0;
  double mean_retry_steps = 0.0;  // achieved at steps_condition
  double best_tr_scale = 1.0;     // achieved at tr_condition
  double steps_residual = 0.0;
  double tr_residual = 0.0;
};

/// Expected retry steps of one read under DefaultStart at tR scale 1 with stochastic
/// (binomial) decoding; an exhausted walk counts every table entry.
double expected_retry_steps(const CellStateModel& model, const VrefSet& default_vrefs, const RetryTable& table,
                            const EccConfig& ecc, PageType page);

/// Mean over the three page types.
double expected_retry_steps(const ModelParams& params, const OperatingCondition& cond, const RetryTable& table,
                            const EccConfig& ecc);

/// Coordinate descent over (retention_coeff, sensing_inflation_exp) with the other
/// parameters fixed. `read_ecc` decodes retry steps; `char_ecc` drives best-tR
/// characterization (deterministic, guardband >= 6).
CalibrationResult calibrate(const ModelParams& initial, const CalibrationTargets& targets, const RetryTable& table,
                            const EccConfig& read_ecc, const EccConfig& char_ecc,
                            const std::vector<double>& tr_grid = default_tr_grid());

}  // namespace rrsim
