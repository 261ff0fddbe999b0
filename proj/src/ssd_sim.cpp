#include "rrsim/ssd_sim.hpp"

#include <deque>
#include <ostream>
#include <queue>
#include <stdexcept>

#include <fmt/format.h>

namespace rrsim {

void Geometry::validate() const {
  if (channels < 1 || chips_per_channel < 1 || dies_per_chip < 1 || pages_per_block < 1 || blocks_per_die < 1)
    throw std::invalid_argument("geometry counts must be >= 1");
  if (page_size_kib < 4 || page_size_kib % 4 != 0)
    throw std::invalid_argument("page_size_kib must be a positive multiple of 4");
}

std::uint64_t Geometry::total_pages() const {
  return static_cast<std::uint64_t>(total_dies()) * static_cast<std::uint64_t>(blocks_per_die) *
         static_cast<std::uint64_t>(pages_per_block);
}

std::optional<PhysicalAddress> map_lba(std::uint64_t logical_page, const Geometry& g) {
  if (logical_page >= g.total_pages()) return std::nullopt;
  PhysicalAddress a;
  std::uint64_t r = logical_page;
  a.channel = static_cast<int>(r % g.channels);
  r /= g.channels;
  a.chip = static_cast<int>(r % g.chips_per_channel);
  r /= g.chips_per_channel;
  a.die = static_cast<int>(r % g.dies_per_chip);
  r /= g.dies_per_chip;
  a.page = static_cast<int>(r % g.pages_per_block);
  a.block = static_cast<int>(r / g.pages_per_block);
  a.page_type = static_cast<PageType>(a.page % 3);
  return a;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void SimResult::write_csv(std::ostream& out) const {
  out << "arrival_us,completion_us,response_us,pages,retry_steps\n";
  for (const auto& r : requests)
    out << fmt::format("{:.3f},{:.3f},{:.3f},{},{}\n", r.arrival_us, r.completion_us, r.response_us(), r.n_pages,
                       r.total_retry_steps);
}

namespace {

enum class EventKind { Arrival, SenseDone, TransferReady, TransferDone, EccDone, ProgramDone, DieFree };

struct Event {
  double time;
  std::uint64_t seq;
  EventKind kind;
  std::uint32_t target;  // request index, op index, or die index
  int step;
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    return a.time != b.time ? a.time > b.time : a.seq > b.seq;
  }
};

struct PageOp {
  std::uint32_t request = 0;
  OpKind kind = OpKind::Read;
  PhysicalAddress addr;
  int die = 0;
  RetryTrace trace;
  int senses_issued = 0;
  bool finished = false;
};

struct Die {
  std::deque<std::uint32_t> queue;
  bool busy = false;
};

struct Channel {
  bool busy = false;
  std::deque<std::pair<std::uint32_t, int>> waiters;
};

class Simulator {
 public:
  Simulator(const std::vector<Request>& requests, const SimConfig& cfg)
      : requests_(requests),
        cfg_(cfg),
        resolver_(cfg.model, cfg.condition, cfg.table, cfg.ecc, cfg.timing, cfg.adaptive_tr_scale),
        dies_(static_cast<std::size_t>(cfg.geometry.total_dies())),
        channels_(static_cast<std::size_t>(cfg.geometry.channels)) {
    groups_per_die_ = (cfg.geometry.blocks_per_die + cfg.history_group_blocks - 1) / cfg.history_group_blocks;
  }

  SimResult run() {
    result_.seed = cfg_.seed;
    if (!requests_.empty()) push(requests_.front().arrival_us, EventKind::Arrival, 0, 0);
    while (!events_.empty()) {
      const Event e = events_.top();
      events_.pop();
      dispatch(e);
    }
    for (std::size_t i = 0; i < records_.size(); ++i)
      if (accepted_[i]) result_.requests.push_back(records_[i]);
    return std::move(result_);
  }

 private:
  void push(double t, EventKind k, std::uint32_t target, int step) { events_.push({t, seq_++, k, target, step}); }

  double sense_time(const PageOp& op) const { return cfg_.timing.t_r * op.trace.tr_scale_used; }

  void dispatch(const Event& e) {
    switch (e.kind) {
      case EventKind::Arrival: on_arrival(e.time, e.target); break;
      case EventKind::SenseDone: on_sense_done(e.time, e.target, e.step); break;
      case EventKind::TransferReady: on_transfer_ready(e.time, e.target, e.step); break;
      case EventKind::TransferDone: on_transfer_done(e.time, e.target, e.step); break;
      case EventKind::EccDone: on_ecc_done(e.time, e.target, e.step); break;
      case EventKind::ProgramDone: finish_op(e.time, e.target); release_die(e.time, ops_[e.target].die); break;
      case EventKind::DieFree: release_die(e.time, static_cast<int>(e.target)); break;
    }
  }

  void on_arrival(double now, std::uint32_t idx) {
    if (idx + 1 < requests_.size()) push(requests_[idx + 1].arrival_us, EventKind::Arrival, idx + 1, 0);
    const Request& req = requests_[idx];
    records_.resize(idx + 1);
    accepted_.resize(idx + 1, false);
    pending_.resize(idx + 1, 0);

    const std::uint64_t bpp = cfg_.geometry.blocks_per_page();
    const std::uint64_t first = req.lba / bpp;
    const std::uint64_t last = (req.lba + req.n_blocks - 1) / bpp;
    std::vector<PhysicalAddress> addrs;
    for (std::uint64_t lpn = first; lpn <= last; ++lpn) {
      auto a = map_lba(lpn, cfg_.geometry);
      if (!a) {
        ++result_.rejected;
        return;
      }
      addrs.push_back(*a);
    }

    accepted_[idx] = true;
    RequestRecord& rec = records_[idx];
    rec.arrival_us = req.arrival_us;
    rec.op = req.op;
    rec.n_pages = static_cast<int>(addrs.size());
    pending_[idx] = static_cast<int>(addrs.size());
    (req.op == OpKind::Read ? result_.reads : result_.writes) += 1;

    for (const auto& a : addrs) {
      PageOp op;
      op.request = idx;
      op.kind = req.op;
      op.addr = a;
      op.die = a.die_index(cfg_.geometry);
      ops_.push_back(op);
      const auto op_index = static_cast<std::uint32_t>(ops_.size() - 1);
      dies_[op.die].queue.push_back(op_index);
      if (!dies_[op.die].busy) start_next(now, op.die);
    }
  }

  void start_next(double now, int die) {
    Die& d = dies_[die];
    if (d.busy || d.queue.empty()) return;
    const std::uint32_t idx = d.queue.front();
    d.queue.pop_front();
    d.busy = true;
    PageOp& op = ops_[idx];
    if (op.kind == OpKind::Write) {
      request_channel(now, idx, 0);
      return;
    }
    if (cfg_.trace_override) {
      op.trace = cfg_.trace_override(op.addr, idx);
    } else {
      Rng rng(splitmix64(cfg_.seed ^ splitmix64(idx)));
      const std::uint64_t group =
          (static_cast<std::uint64_t>(op.die) * groups_per_die_ + op.addr.block / cfg_.history_group_blocks) * 3 +
          static_cast<std::uint64_t>(op.addr.page_type);
      op.trace = resolver_.resolve(cfg_.policy, op.addr.page_type, group, history_, rng);
    }
    ++result_.page_reads;
    result_.retry_steps += static_cast<std::uint64_t>(op.trace.n_steps);
    RequestRecord& rec = records_[op.request];
    rec.n_page_reads += 1;
    rec.total_retry_steps += op.trace.n_steps;
    if (!op.trace.success) {
      ++result_.uncorrectable_reads;
      rec.uncorrectable = true;
    }
    op.senses_issued = 1;
    push(now + sense_time(op), EventKind::SenseDone, idx, 1);
  }

  void on_sense_done(double now, std::uint32_t idx, int step) {
    PageOp& op = ops_[idx];
    if (op.finished) return;  // speculative sense aborted by the final ECC result
    if (!cfg_.policy.pipelined) {
      request_channel(now, idx, step);
      return;
    }
    const double moved = now + cfg_.timing.cache_move;
    push(moved, EventKind::TransferReady, idx, step);
    if (step < resolver_.table().size()) {
      op.senses_issued = step + 1;
      push(moved + sense_time(op), EventKind::SenseDone, idx, step + 1);
    }
  }

  void on_transfer_ready(double now, std::uint32_t idx, int step) {
    if (ops_[idx].finished) return;
    request_channel(now, idx, step);
  }

  void request_channel(double now, std::uint32_t idx, int step) {
    Channel& ch = channels_[ops_[idx].addr.channel];
    if (ch.busy) {
      ch.waiters.emplace_back(idx, step);
      return;
    }
    ch.busy = true;
    push(now + cfg_.timing.t_x, EventKind::TransferDone, idx, step);
  }

  void release_channel(double now, int channel) {
    Channel& ch = channels_[channel];
    ch.busy = false;
    while (!ch.waiters.empty()) {
      auto [idx, step] = ch.waiters.front();
      ch.waiters.pop_front();
      if (ops_[idx].finished) continue;  // cancelled speculative transfer
      ch.busy = true;
      push(now + cfg_.timing.t_x, EventKind::TransferDone, idx, step);
      return;
    }
  }

  void on_transfer_done(double now, std::uint32_t idx, int step) {
    PageOp& op = ops_[idx];
    release_channel(now, op.addr.channel);
    if (op.kind == OpKind::Write) {
      push(now + cfg_.timing.t_prog, EventKind::ProgramDone, idx, 0);
      return;
    }
    if (op.finished) return;
    push(now + cfg_.timing.t_e, EventKind::EccDone, idx, step);
    const bool last = step == op.trace.n_steps;
    if (last && (!cfg_.policy.pipelined || op.senses_issued == step)) release_die(now, op.die);
  }

  void on_ecc_done(double now, std::uint32_t idx, int step) {
    PageOp& op = ops_[idx];
    if (step < op.trace.n_steps) {
      if (!cfg_.policy.pipelined) {
        op.senses_issued = step + 1;
        push(now + sense_time(op), EventKind::SenseDone, idx, step + 1);
      }
      return;
    }
    op.finished = true;
    finish_op(now, idx);
    if (cfg_.policy.pipelined && op.senses_issued > step) {
      if (cfg_.timing.speculative_abort == SpeculativeAbort::Reset) {
        push(now + cfg_.timing.t_rst, EventKind::DieFree, static_cast<std::uint32_t>(op.die), 0);
      } else {
        release_die(now, op.die);
      }
    }
  }

  void finish_op(double now, std::uint32_t idx) {
    const std::uint32_t req = ops_[idx].request;
    if (--pending_[req] == 0) {
      records_[req].completion_us = now;
      if (records_[req].uncorrectable) ++result_.uncorrectable_requests;
    }
  }

  void release_die(double now, int die) {
    dies_[die].busy = false;
    start_next(now, die);
  }

  const std::vector<Request>& requests_;
  const SimConfig& cfg_;
  ReadResolver resolver_;
  HistoryStore history_;
  std::vector<Die> dies_;
  std::vector<Channel> channels_;
  std::vector<PageOp> ops_;
  std::vector<RequestRecord> records_;
  std::vector<bool> accepted_;
  std::vector<int> pending_;
  std::priority_queue<Event, std::vector<Event>, EventLater> events_;
  std::uint64_t seq_ = 0;
  std::uint64_t groups_per_die_ = 1;
  SimResult result_;
};

}  // namespace

SimResult simulate(const std::vector<Request>& requests, const SimConfig& config) {
  config.geometry.validate();
  if (config.history_group_blocks < 1) throw std::invalid_argument("history_group_blocks must be >= 1");
  for (std::size_t i = 1; i < requests.size(); ++i)
    if (requests[i].arrival_us < requests[i - 1].arrival_us)
      throw std::invalid_argument("request arrivals must be non-decreasing");
  Simulator sim(requests, config);
  return sim.run();
}

}  // namespace rrsim
