#pragma once

#include <vector>

namespace rrsim {

enum class SpeculativeAbort { Reset, Free };

struct TimingParams {
  double t_r = 61.0;     // page sensing, us
  double t_x = 18.3;     // page data transfer, us
  double t_e = 6.0;      // ECC decode, us
  double t_prog = 660.0; // page program, us
  double t_rst = 5.0;    // reset of an in-flight sense, us
  double cache_move = 0.0;
  SpeculativeAbort speculative_abort = SpeculativeAbort::Reset;

  void validate() const;
};

struct Interval {
  double start = 0.0;
  double end = 0.0;
  double length() const { return end - start; }
};

struct StepSchedule {
  Interval sense;
  Interval transfer;
  Interval ecc;
};

struct Timeline {
  std::vector<StepSchedule> steps;
  std::vector<Interval> speculative_senses;  // issued after the final step's sense
  double total_latency_us = 0.0;
  double die_busy_until_us = 0.0;
  std::vector<Interval> channel_busy_intervals;
};

double latency_sequential(int n_steps, const TimingParams& t, double tr_scale = 1.0);
double latency_pipelined(int n_steps, const TimingParams& t, double tr_scale = 1.0);

/// Idle-device schedule of one read-retry operation starting at time 0.
/// `more_entries` says whether the retry table had an entry after the last step,
/// i.e. whether a pipelined read has a speculative sense in flight when it finishes.
Timeline build_timeline(int n_steps, bool more_entries, const TimingParams& t, bool pipelined,
                        double tr_scale = 1.0);

}  // namespace rrsim
