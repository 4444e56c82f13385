#pragma once

#include "gpack/partition.hpp"
#include "gpack/policy.hpp"

namespace gpack {

// Queue-driven dynamic placement. On each arrival the new job joins its
// queue, one random placement is proposed and kept with logistic probability
// in its weight, and waiting jobs fill idle virtual templates. Weights are
// evaluated just after the triggering transition.

inline EventOutcome dgp_on_arrival(SystemState& state, int type,
                                   const std::vector<JobType>& jobs, const ClusterSpec& cluster,
                                   const WeightModel& weights, RandomStream& rng,
                                   ClockHost& host) {
  EventOutcome out;
  auto j = static_cast<std::size_t>(type);
  std::uint64_t job = state.next_job_id++;
  state.waiting[j].push_back(job);
  state.total_arrivals[j] += 1;
  out.actions.push_back({ActionKind::JobEnqueued, type, 0});

  if (auto t = random_partition(state.config, type, jobs[j], cluster, rng)) {
    double w = weights.weight(*t, state);
    double u = rng.u01(Sub::Acceptance, j);
    if (u < accept_probability(w, weights.params().beta)) {
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

// Fires when a template's lifetime clock rings: the template leaves (its job,
// if any, departs) and the same placement is re-proposed as a fresh virtual
// template with logistic probability in the post-transition weight.
inline EventOutcome dgp_on_departure(SystemState& state, std::uint64_t template_id,
                                     const WeightModel& weights, RandomStream& rng,
                                     ClockHost& host) {
  EventOutcome out;
  Template gone = state.config.remove(template_id);
  auto j = static_cast<std::size_t>(gone.job_type);
  out.actions.push_back({ActionKind::TemplateDestroyed, gone.job_type, template_id});
  if (gone.tag == TemplateTag::Actual) {
    state.total_departures[j] += 1;
    out.actions.push_back({ActionKind::JobDeparted, gone.job_type, template_id});
  }

  Template again = gone;
  again.tag = TemplateTag::Virtual;
  again.job = 0;
  again.clock_id = 0;
  double w = weights.weight(again, state);
  if (rng.u01(Sub::Acceptance, j) < accept_probability(w, weights.params().beta)) {
    std::uint64_t id = state.config.add(std::move(again));
    state.config.at(id).clock_id = host.schedule_departure(gone.job_type, id);
    out.actions.push_back({ActionKind::TemplateCreated, gone.job_type, id});
  }
  fill_waiting_jobs(state, j, rng, host, /*clock_on_fill=*/false, out.actions);
  return out;
}

}  // namespace gpack
