#pragma once

#include "rrsim/calibration.hpp"

namespace rrsim::testing {

inline EccConfig char_ecc() {
  EccConfig e;
  e.deterministic_mode = true;
  e.guardband_sigmas = 6.0;
  return e;
}

inline const RetryTable& default_table() {
  static const RetryTable t = build_retry_table(40.0, 16);
  return t;
}

// Calibrated once per process; cheap (analytic objective).
inline const ModelParams& calibrated() {
  static const ModelParams p =
      calibrate(ModelParams{}, CalibrationTargets{}, default_table(), EccConfig{}, char_ecc()).params;
  return p;
}

}  // namespace rrsim::testing
