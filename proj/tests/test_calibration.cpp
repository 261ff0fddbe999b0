#include <cmath>
#include <random>

#include <doctest.h>

#include "rrsim/calibration.hpp"
#include "support.hpp"

using namespace rrsim;
using rrsim::testing::char_ecc;
using rrsim::testing::default_table;

TEST_CASE("expected steps agree with sampled walks") {
  ModelParams p;
  p.retention_coeff = 55.0;
  const OperatingCondition cond{90.0, 0};
  const EccConfig ecc;
  const double expected = expected_retry_steps(p, cond, default_table(), ecc);
  ReadResolver r(p, cond, default_table(), ecc, TimingParams{});
  Rng rng(99);
  const int n = 30'000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = r.resolve_at(1.0, kAllPageTypes[i % 3], rng).n_steps;
    sum += s;
    sq += s * s;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean - expected) <= 4.0 * sd / std::sqrt(n));
}

TEST_CASE("calibration hits both targets") {
  const CalibrationTargets targets;
  const auto res = calibrate(ModelParams{}, targets, default_table(), EccConfig{}, char_ecc());
  CHECK(res.converged);
  CHECK(res.evaluations <= targets.max_evaluations);
  CHECK(std::abs(res.mean_retry_steps - 4.5) <= 0.25);
  CHECK(res.best_tr_scale == doctest::Approx(0.75));
  CHECK(characterize_condition(res.params, {365.0, 1500}, default_table(), char_ecc(), default_tr_grid()).tr_scale ==
        doctest::Approx(0.75));
}

TEST_CASE("already calibrated parameters come back unchanged") {
  const auto first = calibrate(ModelParams{}, CalibrationTargets{}, default_table(), EccConfig{}, char_ecc());
  const auto again = calibrate(first.params, CalibrationTargets{}, default_table(), EccConfig{}, char_ecc());
  CHECK(again.converged);
  CHECK(again.params.retention_coeff == first.params.retention_coeff);
  CHECK(again.params.sensing_inflation_exp == first.params.sensing_inflation_exp);
}

TEST_CASE("unreachable targets report non-convergence with residuals") {
  CalibrationTargets t;
  t.mean_retry_steps = 40.0;  // longer than the table
  t.max_evaluations = 60;
  const auto res = calibrate(ModelParams{}, t, default_table(), EccConfig{}, char_ecc());
  CHECK_FALSE(res.converged);
  CHECK(res.steps_residual != 0.0);
}
