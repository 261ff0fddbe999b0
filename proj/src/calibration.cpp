#include "rrsim/calibration.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/binomial.hpp>

namespace rrsim {

namespace {

double codeword_success_prob(double rber, const EccConfig& ecc) {
  if (rber <= 0.0) return 1.0;
  if (rber >= 1.0) return 0.0;
  const boost::math::binomial_distribution<double> dist(ecc.codeword_payload_bits, rber);
  return boost::math::cdf(dist, ecc.correction_capability_t);
}

bool on_grid(double a, double b) { return std::abs(a - b) < 1e-9; }

}  // namespace

double expected_retry_steps(const CellStateModel& model, const VrefSet& default_vrefs, const RetryTable& table,
                            const EccConfig& ecc, PageType page) {
  double expected = 0.0;
  double reach = 1.0;
  for (int k = 0; k < table.size(); ++k) {
    expected += reach;
    const double rber = page_rber(model, page, table.apply(default_vrefs, k), 1.0, 0.0);
    double p_success = 0.0;
    if (ecc.deterministic_mode) {
      p_success = deterministic_error_count(rber, ecc) <= ecc.correction_capability_t ? 1.0 : 0.0;
    } else {
      p_success = std::pow(codeword_success_prob(rber, ecc), ecc.codewords_per_page);
    }
    reach *= 1.0 - p_success;
  }
  return expected;
}

double expected_retry_steps(const ModelParams& params, const OperatingCondition& cond, const RetryTable& table,
                            const EccConfig& ecc) {
  const CellStateModel model = derive_distributions(params, cond);
  const VrefSet vrefs = default_vrefs(params);
  double sum = 0.0;
  for (PageType p : kAllPageTypes) sum += expected_retry_steps(model, vrefs, table, ecc, p);
  return sum / 3.0;
}

CalibrationResult calibrate(const ModelParams& initial, const CalibrationTargets& targets, const RetryTable& table,
                            const EccConfig& read_ecc, const EccConfig& char_ecc, const std::vector<double>& tr_grid) {
  initial.validate();
  const double target_tr = 1.0 - targets.tr_reduction;

  CalibrationResult res;
  res.params = initial;

  auto steps_at = [&](const ModelParams& p) {
    ++res.evaluations;
    try {
      return expected_retry_steps(p, targets.steps_condition, table, read_ecc);
    } catch (const std::domain_error&) {
      return static_cast<double>(table.size());  // states overlap: treat as hopeless
    }
  };
  auto tr_at = [&](const ModelParams& p) {
    ++res.evaluations;
    try {
      return characterize_condition(p, targets.tr_condition, table, char_ecc, tr_grid).tr_scale;
    } catch (const std::domain_error&) {
      return 1.0;
    }
  };
  auto record = [&](double steps, double tr) {
    res.mean_retry_steps = steps;
    res.best_tr_scale = tr;
    res.steps_residual = steps - targets.mean_retry_steps;
    res.tr_residual = tr - target_tr;
    res.converged = std::abs(res.steps_residual) <= targets.steps_tolerance && on_grid(tr, target_tr);
  };
  auto budget_left = [&] { return res.evaluations < targets.max_evaluations; };

  record(steps_at(res.params), tr_at(res.params));
  if (res.converged) return res;

  for (int sweep = 0; sweep < 3 && budget_left(); ++sweep) {
    // retention_coeff: expected steps is increasing in it; bisect onto the target.
    if (std::abs(res.steps_residual) > targets.steps_tolerance / 10.0) {
      ModelParams p = res.params;
      double lo = 0.0, hi = std::max(1.0, p.retention_coeff);
      p.retention_coeff = hi;
      while (budget_left() && steps_at(p) < targets.mean_retry_steps) {
        lo = hi;
        hi *= 2.0;
        p.retention_coeff = hi;
      }
      while (budget_left() && hi - lo > 1e-3) {
        p.retention_coeff = 0.5 * (lo + hi);
        (steps_at(p) < targets.mean_retry_steps ? lo : hi) = p.retention_coeff;
      }
      p.retention_coeff = 0.5 * (lo + hi);
      res.params = p;
    }

    // sensing_inflation_exp: the safe tR scale is non-decreasing in it. Locate both
    // edges of the interval that yields exactly the target scale; take the midpoint.
    {
      ModelParams p = res.params;
      auto tr_for = [&](double eta) {
        p.sensing_inflation_exp = eta;
        return tr_at(p);
      };
      double eta_max = 8.0;
      if (tr_for(eta_max) < target_tr - 1e-9) break;  // even a steep penalty allows too much reduction
      // lower edge: smallest eta with tr >= target
      double lo = 0.0, hi = eta_max;
      while (budget_left() && hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        (tr_for(mid) >= target_tr - 1e-9 ? hi : lo) = mid;
      }
      const double lower_edge = hi;
      // upper edge: largest eta with tr <= target
      lo = lower_edge;
      hi = eta_max;
      if (tr_for(hi) <= target_tr + 1e-9) {
        lo = hi;
      } else {
        while (budget_left() && hi - lo > 1e-4) {
          const double mid = 0.5 * (lo + hi);
          (tr_for(mid) <= target_tr + 1e-9 ? lo : hi) = mid;
        }
      }
      p.sensing_inflation_exp = 0.5 * (lower_edge + lo);
      res.params = p;
    }

    record(steps_at(res.params), tr_at(res.params));
    if (res.converged) break;
  }
  return res;
}

}  // namespace rrsim
