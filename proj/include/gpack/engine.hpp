#pragma once

#include <cstdint>
#include <limits>
#include <queue>
#include <unordered_set>
#include <vector>

#include "gpack/adgp.hpp"
#include "gpack/dgp.hpp"
#include "gpack/frame.hpp"
#include "gpack/metrics.hpp"
#include "gpack/roundrobin.hpp"

namespace gpack {

struct EngineOptions {
  double horizon = 1000.0;
  std::uint64_t max_events = std::numeric_limits<std::uint64_t>::max();
  double warmup_fraction = 0.1;
  bool collect_trace = false;
  // Occupancy tracking: when set, every event is charged to its
  // configuration's index in this space. The frame-based policy needs an
  // enumerated space anyway and builds one if none is given.
  const ConfigurationSpace* space = nullptr;
  std::uint64_t max_states = 100000;  // budget for an internally built space
};

struct RunResult {
  MetricsReport report;
  std::vector<TraceRecord> trace;
};

namespace detail {

enum class EvKind { FrameEpoch = 0, Arrival = 1, Departure = 2, Proposal = 3 };

inline const char* ev_name(EvKind k) {
  switch (k) {
    case EvKind::FrameEpoch: return "epoch";
    case EvKind::Arrival: return "arrival";
    case EvKind::Departure: return "departure";
    case EvKind::Proposal: return "proposal";
  }
  return "?";
}

struct Event {
  double time = 0.0;
  int rank = 0;            // tie order at equal times
  std::uint64_t seq = 0;   // creation order, also the cancellation handle
  EvKind kind = EvKind::Arrival;
  int type = -1;
  std::uint64_t tpl = 0;
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.rank != b.rank) return a.rank > b.rank;
    return a.seq > b.seq;
  }
};

// Min-heap with lazy cancellation.
class EventQueue {
 public:
  std::uint64_t push(double time, EvKind kind, int type, std::uint64_t tpl) {
    std::uint64_t seq = ++next_seq_;
    heap_.push(Event{time, static_cast<int>(kind), seq, kind, type, tpl});
    return seq;
  }

  void cancel(std::uint64_t seq) {
    if (seq != 0) canceled_.insert(seq);
  }

  bool pop(Event& out) {
    while (!heap_.empty()) {
      Event e = heap_.top();
      heap_.pop();
      auto it = canceled_.find(e.seq);
      if (it != canceled_.end()) {
        canceled_.erase(it);
        continue;
      }
      out = e;
      return true;
    }
    return false;
  }

 private:
  std::priority_queue<Event, std::vector<Event>, EventLater> heap_;
  std::unordered_set<std::uint64_t> canceled_;
  std::uint64_t next_seq_ = 0;
};

class EngineClockHost : public ClockHost {
 public:
  EngineClockHost(EventQueue& q, RandomStream& rng, const std::vector<JobType>& jobs,
                  const double& now)
      : queue_(q), rng_(rng), jobs_(jobs), now_(now) {}

  std::uint64_t schedule_departure(int type, std::uint64_t template_id) override {
    double dt = rng_.exponential(Sub::Departures, static_cast<std::size_t>(type),
                                 jobs_[static_cast<std::size_t>(type)].service_rate);
    return queue_.push(now_ + dt, EvKind::Departure, type, template_id);
  }

  void cancel(std::uint64_t clock_id) override { queue_.cancel(clock_id); }

 private:
  EventQueue& queue_;
  RandomStream& rng_;
  const std::vector<JobType>& jobs_;
  const double& now_;
};

inline std::string join_actions(const std::vector<Action>& actions) {
  std::string out;
  for (const Action& a : actions) {
    if (!out.empty()) out += ",";
    out += action_name(a.kind);
  }
  return out;
}

inline bool coexistence_violated(const SystemState& s) {
  for (std::size_t j = 0; j < s.waiting.size(); ++j)
    if (!s.waiting[j].empty() && s.config.virtual_count(j) > 0) return true;
  return false;
}

}  // namespace detail

// Event-driven continuous-time run of one scheduling policy. Deterministic
// for a fixed (scenario, policy, seed): simultaneous events break ties by
// (kind, creation order) and all randomness flows through named substreams.
inline RunResult run_continuous(const ClusterSpec& cluster, const std::vector<JobType>& jobs,
                                const SchedulerPolicy& policy, const EngineOptions& opts,
                                std::uint64_t seed) {
  policy.params.validate();
  if (!(opts.horizon >= 0)) throw ValidationError("engine: horizon must be >= 0");
  if (opts.warmup_fraction < 0 || opts.warmup_fraction >= 1)
    throw ValidationError("engine: warmup fraction must lie in [0, 1)");
  if (policy.variant == PolicyVariant::Adgp && policy.mode == WeightMode::Fixed &&
      policy.fixed_per_type.empty())
    throw ValidationError(
        "engine: the dedicated-clock policy supports fixed weights only as per-type queue terms");

  const int M = cluster.total_slots();
  const auto J = jobs.size();
  ConfigurationSpace own_space;
  const ConfigurationSpace* space = opts.space;
  if (policy.variant == PolicyVariant::FrameBased && space == nullptr) {
    own_space = enumerate_configurations(cluster, jobs, opts.max_states);
    space = &own_space;
  }

  SystemState state(M, J);
  RandomStream rng(seed);
  detail::EventQueue queue;
  detail::EngineClockHost host(queue, rng, jobs, state.clock);
  WeightModel wm = policy.weight_model(M);
  RoundRobinCursor cursor;
  MetricsAccumulator acc(J, opts.horizon, opts.warmup_fraction, policy.params.h,
                         policy.params.b);
  RunResult result;

  auto config_index = [&]() -> int {
    if (space == nullptr) return -1;
    auto it = space->index.find(state.config.key());
    return it == space->index.end() ? -1 : it->second;
  };

  std::vector<std::uint64_t> tick_seq(J, 0);
  auto reschedule_ticks = [&]() {
    for (std::size_t j = 0; j < J; ++j) {
      queue.cancel(tick_seq[j]);
      double rate = adgp_tick_rate(j, state, wm);
      double dt = rng.exponential(Sub::Clocks, j, rate);
      tick_seq[j] = queue.push(state.clock + dt, detail::EvKind::Proposal,
                               static_cast<int>(j), 0);
    }
  };

  for (std::size_t j = 0; j < J; ++j) {
    if (jobs[j].arrival_rate > 0) {
      double dt = rng.exponential(Sub::Arrivals, j, jobs[j].arrival_rate);
      queue.push(dt, detail::EvKind::Arrival, static_cast<int>(j), 0);
    }
  }
  if (policy.variant == PolicyVariant::Adgp) reschedule_ticks();
  if (policy.variant == PolicyVariant::FrameBased)
    queue.push(0.0, detail::EvKind::FrameEpoch, -1, 0);

  std::uint64_t events = 0;
  double end_time = opts.horizon;
  detail::Event ev;
  while (queue.pop(ev)) {
    if (ev.time > opts.horizon) break;
    if (events >= opts.max_events) {
      end_time = state.clock;
      break;
    }
    acc.advance(ev.time, snapshot_of(state, config_index()));
    state.clock = ev.time;

    EventOutcome outcome;
    switch (ev.kind) {
      case detail::EvKind::Arrival: {
        switch (policy.variant) {
          case PolicyVariant::Dgp:
            outcome = dgp_on_arrival(state, ev.type, jobs, cluster, wm, rng, host);
            break;
          case PolicyVariant::Adgp:
            outcome = adgp_on_arrival(state, ev.type, rng, host);
            break;
          case PolicyVariant::FrameBased:
            outcome = frame_on_arrival(state, ev.type, rng, host);
            break;
          case PolicyVariant::RoundRobin:
            outcome = rr_on_arrival(state, ev.type, jobs, cluster, cursor, rng, host);
            break;
        }
        auto j = static_cast<std::size_t>(ev.type);
        double dt = rng.exponential(Sub::Arrivals, j, jobs[j].arrival_rate);
        queue.push(state.clock + dt, detail::EvKind::Arrival, ev.type, 0);
        break;
      }
      case detail::EvKind::Departure: {
        switch (policy.variant) {
          case PolicyVariant::Dgp:
            outcome = dgp_on_departure(state, ev.tpl, wm, rng, host);
            break;
          case PolicyVariant::Adgp:
            outcome = adgp_on_departure(state, ev.tpl);
            break;
          case PolicyVariant::FrameBased:
            outcome = frame_on_departure(state, ev.tpl, rng, host);
            break;
          case PolicyVariant::RoundRobin:
            outcome = rr_on_departure(state, ev.tpl, jobs, cluster, cursor, rng, host);
            break;
        }
        break;
      }
      case detail::EvKind::Proposal:
        tick_seq[static_cast<std::size_t>(ev.type)] = 0;  // this clock just fired
        outcome = adgp_on_tick(state, ev.type, jobs, cluster, wm, rng, host);
        break;
      case detail::EvKind::FrameEpoch: {
        int chosen = frame_select_config(state, *space, policy.params, rng);
        outcome = frame_on_epoch(state, *space, chosen, rng, host);
        queue.push(state.clock + policy.params.frame_length, detail::EvKind::FrameEpoch, -1, 0);
        break;
      }
    }
    if (policy.variant == PolicyVariant::Adgp) reschedule_ticks();

    events += 1;
    acc.add_event(outcome.interruptions, outcome.drops);
    acc.add_violations(policy.variant != PolicyVariant::RoundRobin &&
                           detail::coexistence_violated(state),
                       !state.conserved());
    if (opts.collect_trace) {
      TraceRecord rec;
      rec.time = state.clock;
      rec.kind = detail::ev_name(ev.kind);
      rec.job_type = ev.type;
      rec.template_id = ev.tpl;
      rec.actions = detail::join_actions(outcome.actions);
      rec.queues = state.queue_vector();
      rec.cost = state.config.total_cost();
      rec.template_count = state.config.total_count();
      rec.config_index = config_index();
      result.trace.push_back(std::move(rec));
    }
  }

  acc.advance(end_time, snapshot_of(state, config_index()));
  state.clock = end_time;
  if (opts.collect_trace) {
    TraceRecord rec;
    rec.time = end_time;
    rec.kind = "end";
    rec.queues = state.queue_vector();
    rec.cost = state.config.total_cost();
    rec.template_count = state.config.total_count();
    rec.config_index = config_index();
    result.trace.push_back(std::move(rec));
  }
  result.report = acc.finish(snapshot_of(state, config_index()), space != nullptr);
  return result;
}

// Loss reference system: no queues, no weights. Arrivals try one random
// placement and are dropped on failure; placed jobs hold their template for
// one service time.
inline RunResult run_loss_system(const ClusterSpec& cluster, const std::vector<JobType>& jobs,
                                 const EngineOptions& opts, std::uint64_t seed) {
  if (!(opts.horizon >= 0)) throw ValidationError("engine: horizon must be >= 0");
  const int M = cluster.total_slots();
  const auto J = jobs.size();
  SystemState state(M, J);
  RandomStream rng(seed);
  detail::EventQueue queue;
  detail::EngineClockHost host(queue, rng, jobs, state.clock);
  // h/b only feed the f-sum diagnostic; the defaults are fine here
  SchedulerParams params;
  MetricsAccumulator acc(J, opts.horizon, opts.warmup_fraction, params.h, params.b);
  RunResult result;

  auto config_index = [&]() -> int {
    if (opts.space == nullptr) return -1;
    auto it = opts.space->index.find(state.config.key());
    return it == opts.space->index.end() ? -1 : it->second;
  };

  for (std::size_t j = 0; j < J; ++j) {
    if (jobs[j].arrival_rate > 0) {
      double dt = rng.exponential(Sub::Arrivals, j, jobs[j].arrival_rate);
      queue.push(dt, detail::EvKind::Arrival, static_cast<int>(j), 0);
    }
  }

  std::uint64_t events = 0;
  double end_time = opts.horizon;
  detail::Event ev;
  while (queue.pop(ev)) {
    if (ev.time > opts.horizon) break;
    if (events >= opts.max_events) {
      end_time = state.clock;
      break;
    }
    acc.advance(ev.time, snapshot_of(state, config_index()));
    state.clock = ev.time;

    EventOutcome outcome;
    if (ev.kind == detail::EvKind::Arrival) {
      auto j = static_cast<std::size_t>(ev.type);
      state.total_arrivals[j] += 1;
      if (auto t = random_partition(state.config, ev.type, jobs[j], cluster, rng)) {
        t->tag = TemplateTag::Actual;
        t->job = state.next_job_id++;
        std::uint64_t id = state.config.add(std::move(*t));
        state.config.at(id).clock_id = host.schedule_departure(ev.type, id);
        outcome.actions.push_back({ActionKind::TemplateCreated, ev.type, id});
        outcome.actions.push_back({ActionKind::JobStarted, ev.type, id});
      } else {
        state.total_departures[j] += 1;  // dropped: counts as an instant departure
        outcome.actions.push_back({ActionKind::JobDropped, ev.type, 0});
        outcome.drops += 1;
      }
      double dt = rng.exponential(Sub::Arrivals, j, jobs[j].arrival_rate);
      queue.push(state.clock + dt, detail::EvKind::Arrival, ev.type, 0);
    } else {
      Template gone = state.config.remove(ev.tpl);
      state.total_departures[static_cast<std::size_t>(gone.job_type)] += 1;
      outcome.actions.push_back({ActionKind::TemplateDestroyed, gone.job_type, ev.tpl});
      outcome.actions.push_back({ActionKind::JobDeparted, gone.job_type, ev.tpl});
    }

    events += 1;
    acc.add_event(0, outcome.drops);
    acc.add_violations(false, !state.conserved());
    if (opts.collect_trace) {
      TraceRecord rec;
      rec.time = state.clock;
      rec.kind = detail::ev_name(ev.kind);
      rec.job_type = ev.type;
      rec.template_id = ev.tpl;
      rec.actions = detail::join_actions(outcome.actions);
      rec.queues = state.queue_vector();
      rec.cost = state.config.total_cost();
      rec.template_count = state.config.total_count();
      rec.config_index = config_index();
      result.trace.push_back(std::move(rec));
    }
  }

  acc.advance(end_time, snapshot_of(state, config_index()));
  state.clock = end_time;
  if (opts.collect_trace) {
    TraceRecord rec;
    rec.time = end_time;
    rec.kind = "end";
    rec.queues = state.queue_vector();
    rec.cost = state.config.total_cost();
    rec.template_count = state.config.total_count();
    rec.config_index = config_index();
    result.trace.push_back(std::move(rec));
  }
  result.report = acc.finish(snapshot_of(state, config_index()), opts.space != nullptr);
  return result;
}

}  // namespace gpack
