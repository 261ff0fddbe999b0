// Acceptance suite: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "rrsim/experiment.hpp"

using namespace rrsim;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_time = secs < limit_s;
  if (!in_time) o.detail += fmt::format(" [over time limit {:.0f}s]", limit_s);
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::cout << fmt::format("{} criterion {}: {} | {} ({:.2f}s)", pass ? "PASS" : "FAIL", id, name, o.detail, secs)
            << std::endl;
}

const ExperimentConfig kConfig{};

EccConfig char_ecc() {
  EccConfig e;
  e.deterministic_mode = true;
  e.guardband_sigmas = kConfig.retry.characterize_guardband_sigmas;
  return e;
}

ModelParams params;
BestTrTable best_tr;

CellStateModel random_model(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> gap(300.0, 700.0), sd(40.0, 200.0);
  std::array<StateDistribution, kNumStates> s{};
  double m = 0.0;
  for (int i = 0; i < kNumStates; ++i) {
    s[i] = {m, sd(rng)};
    m += gap(rng);
  }
  return CellStateModel(s);
}

}  // namespace

int main() {
  const RetryTable table = kConfig.retry.table();
  const auto requests = load_workload(kConfig);  // read90 preset

  criterion(1, "calibrated mean retry steps at 90 d / 0 P/E", 30.0, [&] {
    const auto res = calibrate(kConfig.model, kConfig.calibration, table, kConfig.ecc, char_ecc(), kConfig.retry.tr_grid);
    params = res.params;
    ReadResolver r(params, {90.0, 0}, table, kConfig.ecc, kConfig.timing);
    const int n = 30'000;
    double steps = 0.0;
    for (int i = 0; i < n; ++i) {
      Rng rng(splitmix64(static_cast<std::uint64_t>(i)));
      steps += r.resolve_at(1.0, kAllPageTypes[i % 3], rng).n_steps;
    }
    const double mean = steps / n;
    return Outcome{std::abs(mean - 4.5) <= 0.25,
                   fmt::format("mean {:.3f} over {} reads (target 4.5 +/- 0.25); retention_coeff {:.3f}, "
                               "sensing_inflation_exp {:.4f}",
                               mean, n, params.retention_coeff, params.sensing_inflation_exp)};
  });

  criterion(2, "safe tR scale at 365 d / 1500 P/E", 10.0, [&] {
    best_tr = characterize_best_tr(params, kConfig.retry.conditions, table, char_ecc(), kConfig.retry.tr_grid);
    const auto e = best_tr.find({365.0, 1500});
    const double tr = e ? e->tr_scale : -1.0;
    return Outcome{std::abs(tr - 0.75) < 1e-9, fmt::format("tr_scale {:.2f} (expected 0.75)", tr)};
  });

  criterion(3, "PR2 per-step reduction", 1.0, [&] {
    double worst = 0.0;
    for (int n = 1; n <= 10; ++n) {
      const double seq = latency_sequential(n + 1, kConfig.timing) - latency_sequential(n, kConfig.timing);
      const double pip = latency_pipelined(n + 1, kConfig.timing) - latency_pipelined(n, kConfig.timing);
      worst = std::max(worst, std::abs(100.0 * (seq - pip) / seq - 28.5));
    }
    return Outcome{worst <= 0.1, fmt::format("max deviation from 28.5% over n=1..10: {:.4f} pp", worst)};
  });

  criterion(4, "AR2 adds no retry steps in deterministic mode", 60.0, [&] {
    int checked = 0, mismatched = 0;
    for (const auto& cond : kConfig.retry.conditions) {
      ReadResolver r(params, cond, table, char_ecc(), kConfig.timing, best_tr.lookup(cond));
      for (PageType p : kAllPageTypes) {
        HistoryStore h;
        Rng rng(0);
        const int full = r.resolve(policy_from_name("baseline"), p, 0, h, rng).n_steps;
        const int adaptive = r.resolve(policy_from_name("ar2"), p, 0, h, rng).n_steps;
        ++checked;
        if (full != adaptive) ++mismatched;
      }
    }
    return Outcome{mismatched == 0,
                   fmt::format("{} of {} (condition, page type) reads changed n_steps", mismatched, checked)};
  });

  criterion(5, "PR2+AR2 vs baseline on read90 at 365 d / 1500 P/E", 120.0, [&] {
    const OperatingCondition cond{365.0, 1500};
    const auto base = run_policy(kConfig, params, best_tr, requests, "baseline", cond);
    const auto cand = run_policy(kConfig, params, best_tr, requests, "pr2ar2", cond);
    const double red = compare(base.summary, cand.summary).mean_reduction_pct;
    return Outcome{red >= 25.0 && red <= 55.0,
                   fmt::format("mean {:.1f} -> {:.1f} us, reduction {:.1f}% (band 25-55%), {} requests",
                               base.summary.mean_us, cand.summary.mean_us, red, base.summary.requests)};
  });

  criterion(6, "PR2+AR2 on HistoryStart vs HistoryStart at aged conditions", 120.0, [&] {
    struct Row {
      OperatingCondition cond;
      double retry_steps;
      double margin;
    };
    std::vector<Row> rows;
    for (const auto& cond : kConfig.sim.sweep.conditions) {
      const auto hist = run_policy(kConfig, params, best_tr, requests, "history", cond);
      const auto both = run_policy(kConfig, params, best_tr, requests, "history_pr2ar2", cond);
      const auto base = run_policy(kConfig, params, best_tr, requests, "baseline", cond);
      rows.push_back({cond, base.summary.mean_retry_steps, compare(hist.summary, both.summary).mean_reduction_pct});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.retry_steps < b.retry_steps; });
    bool positive = true, ordered = true;
    std::string detail;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      positive = positive && rows[i].margin > 0.0;
      if (i > 0) ordered = ordered && rows[i].margin > rows[i - 1].margin;
      detail += fmt::format("{}{}: steps {:.2f}, margin {:.2f}%", i ? "; " : "", to_string(rows[i].cond),
                            rows[i].retry_steps, rows[i].margin);
    }
    detail += fmt::format(" | all positive: {}, increasing with retry count: {}", positive, ordered);
    return Outcome{positive && ordered, detail};
  });

  criterion(7, "oracle equivalences", 120.0, [&] {
    // (a) single-request simulation vs closed form
    int a_bad = 0;
    for (const char* policy : {"baseline", "pr2"}) {
      for (int n = 1; n <= 10; ++n) {
        SimConfig c;
        c.policy = policy_from_name(policy);
        c.trace_override = [n](const PhysicalAddress&, std::uint64_t) {
          RetryTrace t;
          t.n_steps = n;
          t.success = true;
          t.more_entries = true;
          t.steps.assign(static_cast<std::size_t>(n), RetryStep{});
          return t;
        };
        const auto r = simulate({{0.0, OpKind::Read, 0, 4}}, c);
        const double expect =
            c.policy.pipelined ? latency_pipelined(n, c.timing) : latency_sequential(n, c.timing);
        if (std::abs(r.requests.at(0).response_us() - expect) > 1e-9) ++a_bad;
      }
    }
    // (b) misread probability vs 10^6-cell Monte Carlo
    std::mt19937_64 rng(2024);
    int b_bad = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const CellStateModel m = random_model(rng);
      const int b = 1 + static_cast<int>(rng() % 7);
      const double v = std::uniform_real_distribution<double>(m.state(b - 1).mean_mv, m.state(b).mean_mv)(rng);
      const double tr = std::uniform_real_distribution<double>(0.5, 1.0)(rng);
      const double eta = 0.4, k = std::pow(tr, -eta);
      const int n = 1'000'000;
      std::uniform_int_distribution<int> state(0, kNumStates - 1);
      std::normal_distribution<double> z(0.0, 1.0);
      int errors = 0;
      for (int i = 0; i < n; ++i) {
        const int st = state(rng);
        if (st != b - 1 && st != b) continue;
        const double vth = m.state(st).mean_mv + m.state(st).stdev_mv * k * z(rng);
        errors += (st == b - 1 && vth > v) || (st == b && vth <= v);
      }
      const double p = boundary_misread_prob(m, b, v, tr, eta);
      if (std::abs(static_cast<double>(errors) / n - p) > 3.0 * std::sqrt(p * (1 - p) / n) + 1e-12) ++b_bad;
    }
    // (c) optimal vref vs 0.1 mV grid search
    int c_bad = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const CellStateModel m = random_model(rng);
      const VrefSet opt = optimal_vref(m, 0.8, 0.3);
      for (int b = 1; b <= kNumBoundaries; ++b) {
        double best_v = 0.0, best_p = 2.0;
        for (double v = m.state(b - 1).mean_mv; v <= m.state(b).mean_mv; v += 0.1) {
          const double p = boundary_misread_prob(m, b, v, 0.8, 0.3);
          if (p < best_p) best_p = p, best_v = v;
        }
        if (std::abs(opt.at(b) - best_v) > 0.1 + 1e-9) ++c_bad;
      }
    }
    return Outcome{a_bad + b_bad + c_bad == 0,
                   fmt::format("(a) {} of 20 latency mismatches, (b) {} of 20 outside 3 sigma, (c) {} of 140 "
                               "boundaries off the grid optimum",
                               a_bad, b_bad, c_bad)};
  });

  criterion(8, "invariants", 120.0, [&] {
    // RBER monotonicity, over models whose read references still separate the states
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> coeff(10.0, 70.0), widen(0.0, 0.08), eta(0.0, 1.0), age(0.0, 365.0),
        tr(0.3, 1.0);
    std::uniform_int_distribution<int> pec(0, 1500);
    auto separates = [](const CellStateModel& m, const VrefSet& v) {
      for (int b = 1; b <= kNumBoundaries; ++b)
        if (!(m.state(b - 1).mean_mv < v.at(b) && v.at(b) < m.state(b).mean_mv)) return false;
      return true;
    };
    int mono_bad = 0, cases = 0;
    while (cases < 200) {
      ModelParams p;
      p.retention_coeff = coeff(rng);
      p.pec_widen_coeff = widen(rng);
      p.sensing_inflation_exp = eta(rng);
      const VrefSet v = default_vrefs(p);
      double a1 = age(rng), a2 = age(rng), t1 = tr(rng), t2 = tr(rng);
      int e1 = pec(rng), e2 = pec(rng);
      if (a1 > a2) std::swap(a1, a2);
      if (e1 > e2) std::swap(e1, e2);
      if (t1 < t2) std::swap(t1, t2);
      if (!separates(derive_distributions(p, {a2, e2}), v)) continue;
      ++cases;
      const auto base = derive_distributions(p, {a1, e1});
      const auto older = derive_distributions(p, {a2, e1});
      const auto worn = derive_distributions(p, {a1, e2});
      for (PageType pt : kAllPageTypes) {
        const double r0 = page_rber(base, pt, v, t1, p.sensing_inflation_exp);
        if (page_rber(older, pt, v, t1, p.sensing_inflation_exp) < r0 ||
            page_rber(worn, pt, v, t1, p.sensing_inflation_exp) < r0 ||
            page_rber(base, pt, v, t2, p.sensing_inflation_exp) < r0)
          ++mono_bad;
      }
    }
    // pipelined <= sequential, equal at n = 1
    bool latency_ok = latency_pipelined(1, kConfig.timing) == latency_sequential(1, kConfig.timing);
    for (int n = 1; n <= 50; ++n)
      latency_ok = latency_ok && latency_pipelined(n, kConfig.timing) <= latency_sequential(n, kConfig.timing);
    // determinism
    const OperatingCondition cond{365.0, 1500};
    auto csv = [&] {
      std::ostringstream os;
      run_policy(kConfig, params, best_tr, requests, "history_pr2ar2", cond).result.write_csv(os);
      return os.str();
    };
    const bool deterministic = csv() == csv();
    // HistoryStart on a locality workload
    const OperatingCondition aged{90.0, 0};
    const double def_steps = run_policy(kConfig, params, best_tr, requests, "baseline", aged).summary.mean_retry_steps;
    const double hist_steps = run_policy(kConfig, params, best_tr, requests, "history", aged).summary.mean_retry_steps;
    const double cut = 100.0 * (1.0 - hist_steps / def_steps);
    return Outcome{mono_bad == 0 && latency_ok && deterministic && cut >= 50.0,
                   fmt::format("monotonicity violations {} / 600; latency ordering {}; byte-identical rerun {}; "
                               "HistoryStart steps {:.2f} vs {:.2f} ({:.1f}% fewer, need >= 50%)",
                               mono_bad, latency_ok ? "ok" : "violated", deterministic, hist_steps, def_steps, cut)};
  });

  std::cout << fmt::format("{} of 8 criteria failed", failures) << std::endl;
  return failures == 0 ? 0 : 1;
}
