#include "rrsim/flash_timing.hpp"

#include <algorithm>
#include <stdexcept>

namespace rrsim {

namespace {

void check_args(int n_steps, double tr_scale) {
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (!(tr_scale > 0.0 && tr_scale <= 1.0)) throw std::invalid_argument("tr_scale must be in (0, 1]");
}

}  // namespace

void TimingParams::validate() const {
  if (!(t_r > 0 && t_x > 0 && t_e > 0 && t_prog > 0 && t_rst > 0))
    throw std::invalid_argument("all timing parameters must be > 0");
  if (!(cache_move >= 0)) throw std::invalid_argument("cache_move must be >= 0");
}

double latency_sequential(int n_steps, const TimingParams& t, double tr_scale) {
  check_args(n_steps, tr_scale);
  return n_steps * (tr_scale * t.t_r + t.t_x + t.t_e);
}

double latency_pipelined(int n_steps, const TimingParams& t, double tr_scale) {
  check_args(n_steps, tr_scale);
  const double sense = tr_scale * t.t_r;
  double transfer_end = 0.0;
  for (int k = 1; k <= n_steps; ++k) {
    const double sense_end = k * sense + (k - 1) * t.cache_move;
    transfer_end = std::max(sense_end + t.cache_move, transfer_end) + t.t_x;
  }
  return transfer_end + t.t_e;
}

Timeline build_timeline(int n_steps, bool more_entries, const TimingParams& t, bool pipelined,
                        double tr_scale) {
  check_args(n_steps, tr_scale);
  const double sense = tr_scale * t.t_r;
  Timeline tl;
  tl.steps.reserve(static_cast<std::size_t>(n_steps));

  if (!pipelined) {
    double now = 0.0;
    for (int k = 0; k < n_steps; ++k) {
      StepSchedule s;
      s.sense = {now, now + sense};
      s.transfer = {s.sense.end, s.sense.end + t.t_x};
      s.ecc = {s.transfer.end, s.transfer.end + t.t_e};
      now = s.ecc.end;
      tl.channel_busy_intervals.push_back(s.transfer);
      tl.steps.push_back(s);
    }
    tl.total_latency_us = now;
    tl.die_busy_until_us = tl.steps.back().transfer.end;
    return tl;
  }

  double sense_start = 0.0;
  double prev_transfer_end = 0.0;
  for (int k = 0; k < n_steps; ++k) {
    StepSchedule s;
    s.sense = {sense_start, sense_start + sense};
    const double ready = s.sense.end + t.cache_move;
    s.transfer = {std::max(ready, prev_transfer_end), 0.0};
    s.transfer.end = s.transfer.start + t.t_x;
    s.ecc = {s.transfer.end, s.transfer.end + t.t_e};
    prev_transfer_end = s.transfer.end;
    sense_start = ready;
    tl.channel_busy_intervals.push_back(s.transfer);
    tl.steps.push_back(s);
  }
  tl.total_latency_us = tl.steps.back().ecc.end;

  if (!more_entries) {
    tl.die_busy_until_us = tl.steps.back().transfer.end;
    return tl;
  }
  // Sensing keeps running back to back until the final ECC result is known.
  // Speculative data already on the channel completes its transfer; nothing new starts.
  while (sense_start < tl.total_latency_us) {
    const Interval spec{sense_start, sense_start + sense};
    tl.speculative_senses.push_back(spec);
    const double ready = spec.end + t.cache_move;
    const double xfer_start = std::max(ready, prev_transfer_end);
    if (spec.end <= tl.total_latency_us && xfer_start < tl.total_latency_us) {
      tl.channel_busy_intervals.push_back({xfer_start, xfer_start + t.t_x});
      prev_transfer_end = xfer_start + t.t_x;
    }
    sense_start = ready;
  }
  const double reset = t.speculative_abort == SpeculativeAbort::Reset ? t.t_rst : 0.0;
  tl.die_busy_until_us = std::max(tl.total_latency_us + reset, tl.steps.back().transfer.end);
  return tl;
}

}  // namespace rrsim
