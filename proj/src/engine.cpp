/*
 * Copyright 2026 The tiersim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "tiersim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "tiersim/bandwidth.hpp"
#include "tiersim/errors.hpp"

namespace tiersim {

const char* to_string(SimMode m) { return m == SimMode::tiered ? "tiered" : "single_tier"; }

SimMode sim_mode_from_string(const std::string& s) {
  if (s == "tiered") return SimMode::tiered;
  if (s == "single_tier") return SimMode::single_tier;
  throw ConfigError("mode must be 'tiered' or 'single_tier', got '" + s + "'");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using FlowId = std::uint32_t;

// A flow with `remaining` bytes left finishes now if the residue is below a
// byte-level or time-level resolution.
bool negligible(double remaining, double rate, double now) {
  return remaining <= 1e-6 || (rate > 0 && remaining / rate <= 1e-12 * now);
}

// Flows with the same class and priority always receive the same max-min
// rate, so each group advances one shared service counter and keeps its
// members ordered by the service value at which they finish.
class GroupScheduler {
 public:
  explicit GroupScheduler(const FlowClasses& classes) : classes_(classes) {}

  FlowId add(std::size_t cls, Priority prio, double bytes) {
    auto g = static_cast<std::uint16_t>(cls * 2 + static_cast<std::size_t>(prio));
    auto id = static_cast<FlowId>(recs_.size());
    double finish = groups_[g].service + bytes;
    recs_.push_back(Rec{g, finish});
    groups_[g].flows.emplace(finish, id);
    dirty_ = true;
    return id;
  }

  bool is_prefetch(FlowId id) const { return recs_[id].group % 2 == 1; }

  void promote(FlowId id) {
    Rec& r = recs_[id];
    if (r.group % 2 == 0) return;
    Group& from = groups_[r.group];
    from.flows.erase({r.finish, id});
    double remaining = r.finish - from.service;
    if (from.flows.empty()) from.service = 0.0;
    r.group = static_cast<std::uint16_t>(r.group - 1);
    Group& to = groups_[r.group];
    r.finish = to.service + remaining;
    to.flows.emplace(r.finish, id);
    dirty_ = true;
  }

  double next_completion() {
    if (dirty_) recompute();
    double best = kInf;
    next_group_ = -1;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const Group& gr = groups_[g];
      if (gr.flows.empty() || gr.rate <= 0) continue;
      double t = now_ + (gr.flows.begin()->first - gr.service) / gr.rate;
      if (t < best) {
        best = t;
        next_group_ = static_cast<int>(g);
      }
    }
    return best;
  }

  void advance(double t) {
    double dt = t - now_;
    if (dt > 0) {
      for (auto& g : groups_) {
        if (!g.flows.empty()) g.service += g.rate * dt;
      }
    }
    now_ = t;
  }

  // Completes the flow that defined next_completion() plus every flow whose
  // residue is negligible. Ids are returned in ascending order.
  std::vector<FlowId> pop_completed() {
    std::vector<FlowId> done;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      Group& gr = groups_[g];
      bool force = static_cast<int>(g) == next_group_;
      while (!gr.flows.empty()) {
        auto it = gr.flows.begin();
        if (!force && !negligible(it->first - gr.service, gr.rate, now_)) break;
        force = false;
        done.push_back(it->second);
        gr.flows.erase(it);
      }
      if (gr.flows.empty()) gr.service = 0.0;
    }
    next_group_ = -1;
    if (!done.empty()) dirty_ = true;
    std::sort(done.begin(), done.end());
    return done;
  }

  std::pair<double, double> tier_rates() {
    if (dirty_) recompute();
    double fast = 0, slow = 0;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      double r = groups_[g].rate * static_cast<double>(groups_[g].flows.size());
      (FlowClasses::is_fast(g / 2) ? fast : slow) += r;
    }
    return {fast, slow};
  }

 private:
  struct Group {
    std::set<std::pair<double, FlowId>> flows;
    double service = 0.0;
    double rate = 0.0;
  };
  struct Rec {
    std::uint16_t group;
    double finish;
  };

  void recompute() {
    std::vector<ShareEntity> ents;
    std::vector<std::size_t> which;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      groups_[g].rate = 0.0;
      if (groups_[g].flows.empty()) continue;
      ents.push_back(ShareEntity{groups_[g].flows.size(), classes_.coef(g / 2), static_cast<Priority>(g % 2), 0.0});
      which.push_back(g);
    }
    max_min_share(ents);
    for (std::size_t i = 0; i < ents.size(); ++i) groups_[which[i]].rate = ents[i].rate;
    dirty_ = false;
  }

  const FlowClasses& classes_;
  std::array<Group, FlowClasses::kCount * 2> groups_{};
  std::vector<Rec> recs_;
  double now_ = 0.0;
  bool dirty_ = true;
  int next_group_ = -1;
};

// One rate per flow, recomputed from scratch whenever the flow set changes;
// every active flow's remaining byte count is decremented at every event.
class FlowScheduler {
 public:
  explicit FlowScheduler(const FlowClasses& classes) : classes_(classes) {}

  FlowId add(std::size_t cls, Priority prio, double bytes) {
    auto id = static_cast<FlowId>(recs_.size());
    recs_.push_back(Rec{cls, prio, bytes, 0.0});
    active_.push_back(id);
    dirty_ = true;
    return id;
  }

  bool is_prefetch(FlowId id) const { return recs_[id].prio == Priority::prefetch; }

  void promote(FlowId id) {
    recs_[id].prio = Priority::demand;
    dirty_ = true;
  }

  double next_completion() {
    if (dirty_) recompute();
    double best = kInf;
    next_ = -1;
    for (FlowId id : active_) {
      const Rec& r = recs_[id];
      if (r.rate <= 0) continue;
      double t = now_ + r.remaining / r.rate;
      if (t < best) {
        best = t;
        next_ = static_cast<std::int64_t>(id);
      }
    }
    return best;
  }

  void advance(double t) {
    double dt = t - now_;
    if (dt > 0) {
      for (FlowId id : active_) recs_[id].remaining -= recs_[id].rate * dt;
    }
    now_ = t;
  }

  std::vector<FlowId> pop_completed() {
    std::vector<FlowId> done, keep;
    for (FlowId id : active_) {
      const Rec& r = recs_[id];
      if (static_cast<std::int64_t>(id) == next_ || negligible(r.remaining, r.rate, now_)) {
        done.push_back(id);
      } else {
        keep.push_back(id);
      }
    }
    active_.swap(keep);
    next_ = -1;
    if (!done.empty()) dirty_ = true;
    std::sort(done.begin(), done.end());
    return done;
  }

  std::pair<double, double> tier_rates() {
    if (dirty_) recompute();
    double fast = 0, slow = 0;
    for (FlowId id : active_) (FlowClasses::is_fast(recs_[id].cls) ? fast : slow) += recs_[id].rate;
    return {fast, slow};
  }

 private:
  struct Rec {
    std::size_t cls;
    Priority prio;
    double remaining;
    double rate;
  };

  void recompute() {
    std::vector<ShareEntity> ents;
    ents.reserve(active_.size());
    for (FlowId id : active_) ents.push_back(ShareEntity{1, classes_.coef(recs_[id].cls), recs_[id].prio, 0.0});
    max_min_share(ents);
    for (std::size_t i = 0; i < active_.size(); ++i) recs_[active_[i]].rate = ents[i].rate;
    dirty_ = false;
  }

  const FlowClasses& classes_;
  std::vector<Rec> recs_;
  std::vector<FlowId> active_;
  double now_ = 0.0;
  bool dirty_ = true;
  std::int64_t next_ = -1;
};

template <class Scheduler>
class Simulator {
 public:
  Simulator(const Trace& trace, const SystemSpec& system, const PolicyConfig& policy, SimMode mode,
            const CacheState* warm, bool merge_transfers)
      : trace_(trace),
        system_(system),
        mode_(mode),
        layout_(trace.regions, system.page_size),
        classes_(system, mode),
        sched_(classes_),
        merge_(merge_transfers) {
    std::map<ThreadId, std::vector<std::size_t>> by_thread;
    for (std::size_t i = 0; i < trace.blocks.size(); ++i) by_thread[trace.blocks[i].thread].push_back(i);
    const auto n = static_cast<std::uint32_t>(by_thread.size());
    std::uint32_t rank = 0;
    for (auto& [id, blocks] : by_thread) {
      ThreadState t;
      t.id = id;
      t.blocks = std::move(blocks);
      t.socket = system.numa && rank >= (n + 1) / 2 ? 1 : 0;
      threads_.push_back(std::move(t));
      ++rank;
    }
    if (n > 0) {
      double share = std::min(1.0, static_cast<double>(system.cores) / static_cast<double>(n));
      compute_rate_ = system.per_core_compute * share;
    }
    if (mode == SimMode::tiered) {
      cache_.emplace(warm ? *warm : CacheState(system.cache_pages()));
      policy_ = make_policy(policy, layout_.ranges());
      resident_ = [this](PageId p) { return cache_->is_resident(p); };
    }
  }

  SimResult run() {
    for (std::uint32_t r = 0; r < threads_.size(); ++r) timers_.emplace(0.0, kStart, r);
    for (;;) {
      double tf = sched_.next_completion();
      double tt = timers_.empty() ? kInf : std::get<0>(timers_.top());
      double t = std::min(tf, tt);
      if (t == kInf) break;
      auto [fast, slow] = sched_.tier_rates();
      samples_.add(now_, t, fast, slow);
      sched_.advance(t);
      now_ = std::max(now_, t);
      if (tf <= tt) {
        for (FlowId id : sched_.pop_completed()) flow_done(id);
      } else {
        auto [time, kind, rank] = timers_.top();
        timers_.pop();
        on_timer(kind, rank);
      }
    }
    for (const auto& t : threads_) {
      if (!t.finished) throw std::logic_error("simulation stalled with unfinished threads");
    }
    res_.per_thread_time.reserve(threads_.size());
    for (const auto& t : threads_) {
      res_.per_thread_time.push_back(t.end_time);
      res_.total_time = std::max(res_.total_time, t.end_time);
    }
    res_.bandwidth_samples = samples_.samples();
    return std::move(res_);
  }

 private:
  enum class Phase : std::uint8_t { enter, fetch, transfer, transferred };
  enum TimerKind : int { kCompute = 0, kLatency = 1, kStart = 2 };

  struct Op {
    bool miss;
    bool write;
    bool victim_dirty;
    std::uint64_t bytes;
    std::int64_t fill;  // fill this op depends on, or -1
  };
  struct ThreadState {
    ThreadId id = 0;
    std::uint32_t socket = 0;
    std::vector<std::size_t> blocks;
    std::size_t next_block = 0;
    std::vector<Op> ops;
    std::size_t idx = 0;
    std::size_t transfer_end = 0;
    Phase phase = Phase::enter;
    int pending = 0;
    bool compute_done = false;
    bool chain_done = false;
    bool finished = false;
    double end_time = 0.0;
  };
  struct Fill {
    bool started = false;
    bool done = false;
    FlowId flow = 0;
    std::vector<std::uint32_t> waiters;
  };
  struct FlowMeta {
    std::size_t cls;
    std::uint64_t bytes;
    std::int64_t fill;
    std::int64_t owner;
  };
  struct PageInfo {
    std::int64_t fill;
    bool prefetched;
  };
  using Timer = std::tuple<double, int, std::uint32_t>;

  FlowId start_flow(std::size_t cls, Priority prio, std::uint64_t bytes, std::int64_t fill, std::int64_t owner) {
    FlowId id = sched_.add(cls, prio, static_cast<double>(bytes));
    meta_.push_back(FlowMeta{cls, bytes, fill, owner});
    return id;
  }

  std::int64_t new_fill() {
    fills_.emplace_back();
    return static_cast<std::int64_t>(fills_.size() - 1);
  }

  void on_timer(int kind, std::uint32_t rank) {
    switch (kind) {
      case kCompute:
        threads_[rank].compute_done = true;
        maybe_finish(rank);
        break;
      case kLatency: step(rank); break;
      case kStart: start_block(rank); break;
    }
  }

  void start_block(std::uint32_t rank) {
    ThreadState& t = threads_[rank];
    const WorkBlock& b = trace_.blocks[t.blocks[t.next_block]];
    t.compute_done = false;
    t.chain_done = false;
    t.idx = 0;
    t.phase = Phase::enter;
    t.pending = 0;
    resolve(rank, b);
    double c = static_cast<double>(b.flops) / compute_rate_;
    if (c > 0) {
      timers_.emplace(now_ + c, kCompute, rank);
    } else {
      t.compute_done = true;
    }
    step(rank);
  }

  // Applies every page touch of the block to the cache in order, issuing
  // prefetches as the policy asks, and records the resulting operations.
  void resolve(std::uint32_t rank, const WorkBlock& b) {
    ThreadState& t = threads_[rank];
    touches_.clear();
    for (const auto& r : b.runs) expand_run(r, layout_, touches_);
    t.ops.clear();
    t.ops.reserve(touches_.size());
    for (const PageTouch& pt : touches_) {
      if (!cache_) {
        t.ops.push_back(Op{false, pt.write, false, pt.bytes, -1});
        continue;
      }
      AccessEvent ev{t.id, pt.region, pt.page, pt.write, false, false, now_};
      if (cache_->is_resident(pt.page)) {
        ev.hit = true;
        std::int64_t fill = -1;
        auto it = pages_.find(pt.page);
        if (it != pages_.end()) {
          fill = fills_[it->second.fill].done ? -1 : it->second.fill;
          if (it->second.prefetched) {
            ev.prefetch_hit = true;
            it->second.prefetched = false;
            ++res_.prefetch_useful;
          }
        }
        cache_->touch(pt.page, pt.write);
        t.ops.push_back(Op{false, pt.write, false, pt.bytes, fill});
      } else {
        ++res_.demand_faults;
        bool dirty = false;
        if (auto victim = cache_->admit(pt.page, pt.write)) {
          pages_.erase(victim->page);
          if (victim->was_dirty) {
            ++res_.writebacks;
            dirty = true;
          }
        }
        std::int64_t fill = new_fill();
        pages_[pt.page] = PageInfo{fill, false};
        t.ops.push_back(Op{true, pt.write, dirty, pt.bytes, fill});
      }
      for (const PrefetchRequest& req : policy_->on_event(ev, resident_)) issue_prefetch(req.page);
    }
  }

  void issue_prefetch(PageId page) {
    if (cache_->is_resident(page)) return;
    if (auto victim = cache_->admit(page, false)) {
      pages_.erase(victim->page);
      if (victim->was_dirty) {
        ++res_.writebacks;
        start_flow(FlowClasses::kSlowWrite, Priority::prefetch, system_.page_size, -1, -1);
      }
    }
    std::int64_t fill = new_fill();
    fills_[fill].started = true;
    fills_[fill].flow = start_flow(FlowClasses::kSlowRead, Priority::prefetch, system_.page_size, fill, -1);
    pages_[page] = PageInfo{fill, true};
    ++res_.prefetch_issued;
  }

  void wait_fill(std::uint32_t rank, std::int64_t fill) {
    Fill& f = fills_[fill];
    f.waiters.push_back(rank);
    threads_[rank].pending = 1;
    if (f.started && sched_.is_prefetch(f.flow)) sched_.promote(f.flow);
  }

  void step(std::uint32_t rank) {
    ThreadState& t = threads_[rank];
    for (;;) {
      if (t.idx >= t.ops.size()) {
        t.chain_done = true;
        maybe_finish(rank);
        return;
      }
      const Op& op = t.ops[t.idx];
      switch (t.phase) {
        case Phase::enter:
          if (op.miss) {
            t.phase = Phase::fetch;
            if (system_.slow.access_latency > 0) {
              timers_.emplace(now_ + system_.slow.access_latency, kLatency, rank);
              return;
            }
            continue;
          }
          if (op.fill >= 0 && !fills_[op.fill].done) {
            wait_fill(rank, op.fill);
            return;
          }
          t.phase = Phase::transfer;
          continue;
        case Phase::fetch: {
          Fill& f = fills_[op.fill];
          f.started = true;
          f.flow = start_flow(FlowClasses::kSlowRead, Priority::demand, system_.page_size, op.fill, -1);
          f.waiters.push_back(rank);
          t.pending = 1;
          if (op.victim_dirty) {
            start_flow(FlowClasses::kSlowWrite, Priority::demand, system_.page_size, -1, rank);
            ++t.pending;
          }
          t.phase = Phase::transfer;
          return;
        }
        case Phase::transfer: {
          std::uint64_t bytes = op.bytes;
          std::size_t j = t.idx + 1;
          if (merge_) {
            while (j < t.ops.size()) {
              const Op& o = t.ops[j];
              if (o.miss || o.write != op.write || (o.fill >= 0 && !fills_[o.fill].done)) break;
              bytes += o.bytes;
              ++j;
            }
          }
          t.transfer_end = j;
          t.phase = Phase::transferred;
          start_flow(FlowClasses::fast(t.socket, op.write), Priority::demand, bytes, -1, rank);
          return;
        }
        case Phase::transferred:
          t.idx = t.transfer_end;
          t.phase = Phase::enter;
          continue;
      }
    }
  }

  void flow_done(FlowId id) {
    const FlowMeta m = meta_[id];
    if (m.cls == FlowClasses::kSlowRead) {
      res_.bytes_slow_read += m.bytes;
    } else if (m.cls == FlowClasses::kSlowWrite) {
      res_.bytes_slow_write += m.bytes;
    } else if (m.cls % 2 == 1) {
      res_.bytes_fast_write += m.bytes;
    } else {
      res_.bytes_fast_read += m.bytes;
    }
    if (m.fill >= 0) {
      Fill& f = fills_[m.fill];
      f.done = true;
      std::vector<std::uint32_t> waiters;
      waiters.swap(f.waiters);
      for (std::uint32_t w : waiters) release(w);
    } else if (m.owner >= 0) {
      auto rank = static_cast<std::uint32_t>(m.owner);
      if (FlowClasses::is_fast(m.cls)) {
        step(rank);
      } else {
        release(rank);
      }
    }
  }

  void release(std::uint32_t rank) {
    if (--threads_[rank].pending == 0) step(rank);
  }

  void maybe_finish(std::uint32_t rank) {
    ThreadState& t = threads_[rank];
    if (!t.chain_done || !t.compute_done) return;
    t.end_time = now_;
    ++t.next_block;
    if (t.next_block < t.blocks.size()) {
      // Next start lands mid-nanosecond so that resolution order only
      // depends on the integer tick and the thread rank.
      auto tick = static_cast<double>(std::llround(now_ * 1e9));
      timers_.emplace((tick + 0.5) * 1e-9, kStart, rank);
    } else {
      t.finished = true;
    }
  }

  const Trace& trace_;
  const SystemSpec& system_;
  SimMode mode_;
  PageLayout layout_;
  FlowClasses classes_;
  Scheduler sched_;
  bool merge_;
  double compute_rate_ = 1.0;
  double now_ = 0.0;
  std::vector<ThreadState> threads_;
  std::optional<CacheState> cache_;
  std::unique_ptr<PrefetchPolicy> policy_;
  ResidencyOracle resident_;
  std::unordered_map<PageId, PageInfo> pages_;
  std::vector<Fill> fills_;
  std::vector<FlowMeta> meta_;
  std::vector<PageTouch> touches_;
  std::priority_queue<Timer, std::vector<Timer>, std::greater<>> timers_;
  SampleRecorder samples_;
  SimResult res_;
};

void check_inputs(const Trace& trace, const SystemSpec& system, SimMode mode) {
  validate(system, mode == SimMode::tiered);
  try {
    validate(trace);
  } catch (const std::invalid_argument& e) {
    throw SimulationError(std::string("invalid trace: ") + e.what());
  }
  if (mode == SimMode::tiered && trace.meta.footprint_bytes > system.slow.capacity) {
    throw SimulationError(fmt::format("footprint of {} bytes exceeds the slow tier capacity of {} bytes",
                                      trace.meta.footprint_bytes, system.slow.capacity));
  }
}

}  // namespace

SimResult simulate(const Trace& trace, const SystemSpec& system, const PolicyConfig& policy, SimMode mode,
                   const CacheState* warm) {
  check_inputs(trace, system, mode);
  return Simulator<GroupScheduler>(trace, system, policy, mode, warm, true).run();
}

SimResult simulate_reference(const Trace& trace, const SystemSpec& system, const PolicyConfig& policy, SimMode mode,
                             const CacheState* warm) {
  check_inputs(trace, system, mode);
  std::uint64_t touches = count_page_touches(trace, system.page_size);
  if (touches > kReferenceTouchLimit) {
    throw SimulationError(
        fmt::format("reference simulation limited to {} page touches, trace has {}", kReferenceTouchLimit, touches));
  }
  return Simulator<FlowScheduler>(trace, system, policy, mode, warm, false).run();
}

}  // namespace tiersim
