#pragma once

#include <cmath>

#include "gpack/partition.hpp"
#include "gpack/policy.hpp"

namespace gpack {

// Dedicated-clock variant: each job type owns a Poisson proposal clock whose
// rate tracks the queue term, so template creation needs no arrival to piggyback
// on. Placement proposals are accepted with probability exp(-cost/beta).

inline double adgp_tick_rate(std::size_t type, const SystemState& state,
                             const WeightModel& weights) {
  const SchedulerParams& p = weights.params();
  double g = weights.queue_term(type, state);
  return p.clock_base_rate * std::exp(g / p.beta);
}

inline EventOutcome adgp_on_tick(SystemState& state, int type, const std::vector<JobType>& jobs,
                                 const ClusterSpec& cluster, const WeightModel& weights,
                                 RandomStream& rng, ClockHost& host) {
  EventOutcome out;
  auto j = static_cast<std::size_t>(type);
  if (auto t = random_partition(state.config, type, jobs[j], cluster, rng)) {
    double u = rng.u01(Sub::Acceptance, j);
    if (u < std::exp(-t->cost / weights.params().beta)) {
      std::uint64_t id = state.config.add(std::move(*t));
      state.config.at(id).clock_id = host.schedule_departure(type, id);
      out.actions.push_back({ActionKind::TemplateCreated, type, id});
    } else {
      out.actions.push_back({ActionKind::TemplateRejected, type, 0});
    }
  }
  fill_waiting_jobs(state, j, rng, host, /*clock_on_fill=*/false, out.actions);
  return out;
}

// Arrivals just join the queue, then grab an idle virtual template if one is
// already there (a tag flip; the template process itself is untouched).
inline EventOutcome adgp_on_arrival(SystemState& state, int type, RandomStream& rng,
                                    ClockHost& host) {
  EventOutcome out;
  auto j = static_cast<std::size_t>(type);
  std::uint64_t job = state.next_job_id++;
  state.waiting[j].push_back(job);
  state.total_arrivals[j] += 1;
  out.actions.push_back({ActionKind::JobEnqueued, type, 0});
  fill_waiting_jobs(state, j, rng, host, /*clock_on_fill=*/false, out.actions);
  return out;
}

// Template lifetime expires; no re-proposal here (the dedicated clocks carry
// all creation pressure).
inline EventOutcome adgp_on_departure(SystemState& state, std::uint64_t template_id) {
  EventOutcome out;
  Template gone = state.config.remove(template_id);
  out.actions.push_back({ActionKind::TemplateDestroyed, gone.job_type, template_id});
  if (gone.tag == TemplateTag::Actual) {
    state.total_departures[static_cast<std::size_t>(gone.job_type)] += 1;
    out.actions.push_back({ActionKind::JobDeparted, gone.job_type, template_id});
  }
  return out;
}

}  // namespace gpack
