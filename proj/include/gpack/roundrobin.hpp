#pragma once

#include <vector>

#include "gpack/policy.hpp"

namespace gpack {

// Weight-blind baseline: place the head-of-line job as soon as enough free
// slots exist anywhere, spreading its nodes across machines in round-robin
// order starting from a rotating cursor. No virtual templates, no queues of
// reserved capacity, no costs consulted.
struct RoundRobinCursor {
  int machine = 0;  // machine ordinal to try first
};

namespace detail {

inline bool rr_try_place(SystemState& state, int type, const JobType& job,
                         const ClusterSpec& cluster, RoundRobinCursor& cur, RandomStream&,
                         ClockHost& host, std::vector<Action>& actions) {
  if (state.config.free_slot_count() < job.node_count) return false;
  auto j = static_cast<std::size_t>(type);
  std::vector<char> taken(static_cast<std::size_t>(cluster.total_slots()), 0);
  std::vector<int> assignment(static_cast<std::size_t>(job.node_count));
  int mc = cur.machine;
  const int L = cluster.machine_count();
  for (int node = 0; node < job.node_count; ++node) {
    int chosen_slot = -1;
    for (int tries = 0; tries < L; ++tries) {
      int ord = (mc + tries) % L;
      int base = cluster.first_slot_of(ord);
      int width = cluster.machines()[static_cast<std::size_t>(ord)].slot_count;
      for (int k = 0; k < width; ++k) {
        int s = base + k;
        if (state.config.slot_free(s) && !taken[static_cast<std::size_t>(s)]) {
          chosen_slot = s;
          mc = (ord + 1) % L;
          break;
        }
      }
      if (chosen_slot >= 0) break;
    }
    taken[static_cast<std::size_t>(chosen_slot)] = 1;
    assignment[static_cast<std::size_t>(node)] = chosen_slot;
  }
  cur.machine = mc;
  Template t = make_template(type, std::move(assignment), job, cluster, TemplateTag::Actual);
  t.job = state.waiting[j].front();
  state.waiting[j].pop_front();
  std::uint64_t id = state.config.add(std::move(t));
  state.config.at(id).clock_id = host.schedule_departure(type, id);
  actions.push_back({ActionKind::TemplateCreated, type, id});
  actions.push_back({ActionKind::JobStarted, type, id});
  return true;
}

inline void rr_drain(SystemState& state, const std::vector<JobType>& jobs,
                     const ClusterSpec& cluster, RoundRobinCursor& cur, RandomStream& rng,
                     ClockHost& host, std::vector<Action>& actions) {
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      while (!state.waiting[j].empty() &&
             rr_try_place(state, static_cast<int>(j), jobs[j], cluster, cur, rng, host, actions))
        progress = true;
    }
  }
}

}  // namespace detail

inline EventOutcome rr_on_arrival(SystemState& state, int type, const std::vector<JobType>& jobs,
                                  const ClusterSpec& cluster, RoundRobinCursor& cur,
                                  RandomStream& rng, ClockHost& host) {
  EventOutcome out;
  auto j = static_cast<std::size_t>(type);
  std::uint64_t job = state.next_job_id++;
  state.waiting[j].push_back(job);
  state.total_arrivals[j] += 1;
  out.actions.push_back({ActionKind::JobEnqueued, type, 0});
  detail::rr_drain(state, jobs, cluster, cur, rng, host, out.actions);
  return out;
}

inline EventOutcome rr_on_departure(SystemState& state, std::uint64_t template_id,
                                    const std::vector<JobType>& jobs, const ClusterSpec& cluster,
                                    RoundRobinCursor& cur, RandomStream& rng, ClockHost& host) {
  EventOutcome out;
  Template gone = state.config.remove(template_id);
  auto j = static_cast<std::size_t>(gone.job_type);
  state.total_departures[j] += 1;
  out.actions.push_back({ActionKind::TemplateDestroyed, gone.job_type, template_id});
  out.actions.push_back({ActionKind::JobDeparted, gone.job_type, template_id});
  detail::rr_drain(state, jobs, cluster, cur, rng, host, out.actions);
  return out;
}

}  // namespace gpack
