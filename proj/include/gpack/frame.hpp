#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "gpack/enumerate.hpp"
#include "gpack/policy.hpp"

namespace gpack {

// Frame-based scheduling: at every epoch pick the configuration maximizing
// sum over templates of alpha*f(Q_type) - cost, hold its template set for a
// whole frame, and serve jobs inside it. Between epochs the set is frozen;
// a completed job merely vacates its template (actual -> virtual).

// Score with f clamped to 0 below 1, so empty queues contribute -cost.
inline double frame_config_score(const Configuration& config,
                                 std::span<const std::int64_t> queues,
                                 const SchedulerParams& p) {
  double score = 0.0;
  for (const auto& [id, t] : config.templates()) {
    double q = static_cast<double>(queues[static_cast<std::size_t>(t.job_type)]);
    score += p.alpha * f_floor(q, p.b) - t.cost;
  }
  return score;
}

// Argmax over the enumerated space, ties uniform. Returns the space index.
inline int frame_select_config(const SystemState& state, const ConfigurationSpace& space,
                               const SchedulerParams& p, RandomStream& rng) {
  std::vector<std::int64_t> q = state.queue_vector();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> ties;
  for (std::size_t i = 0; i < space.configs.size(); ++i) {
    double s = frame_config_score(space.configs[i], q, p);
    double scale = std::max(std::abs(s), std::isfinite(best) ? std::abs(best) : 0.0);
    double tol = 1e-12 * std::max(1.0, scale);
    if (s > best + tol) {
      best = s;
      ties.assign(1, static_cast<int>(i));
    } else if (s >= best - tol) {
      ties.push_back(static_cast<int>(i));
    }
  }
  std::size_t pick = 0;
  if (ties.size() > 1)
    pick = static_cast<std::size_t>(rng.uniform_int(Sub::Ties, 0, ties.size()));
  return ties[pick];
}

// Rebuild the placed template set to match `chosen`. Templates present in
// both (same type and assignment) survive untouched, running jobs included;
// evicted jobs rejoin the head of their queue; then waiting jobs fill the
// fresh virtual templates, drawing service clocks as they start.
inline EventOutcome frame_on_epoch(SystemState& state, const ConfigurationSpace& space,
                                   int chosen, RandomStream& rng, ClockHost& host) {
  EventOutcome out;
  const Configuration& target = space.configs[static_cast<std::size_t>(chosen)];
  std::map<TemplateKey, int> need;
  std::map<TemplateKey, double> cost_of;
  for (const auto& [id, t] : target.templates()) {
    need[key_of(t)] += 1;
    cost_of[key_of(t)] = t.cost;
  }

  std::vector<std::uint64_t> current_ids;
  for (const auto& [id, t] : state.config.templates()) current_ids.push_back(id);

  std::vector<std::vector<std::uint64_t>> evicted_jobs(state.waiting.size());
  for (std::uint64_t id : current_ids) {
    {
      const Template& t = state.config.at(id);
      auto it = need.find(key_of(t));
      if (it != need.end() && it->second > 0) {
        it->second -= 1;  // retained in place
        continue;
      }
    }
    Template gone = state.config.remove(id);
    auto j = static_cast<std::size_t>(gone.job_type);
    if (gone.tag == TemplateTag::Actual) {
      host.cancel(gone.clock_id);
      evicted_jobs[j].push_back(gone.job);
      out.actions.push_back({ActionKind::JobInterrupted, gone.job_type, id});
      out.interruptions += 1;
    }
    out.actions.push_back({ActionKind::TemplateDestroyed, gone.job_type, id});
  }
  // Interrupted jobs go back to the head of their queues, original order.
  for (std::size_t j = 0; j < evicted_jobs.size(); ++j)
    for (auto it = evicted_jobs[j].rbegin(); it != evicted_jobs[j].rend(); ++it)
      state.waiting[j].push_front(*it);

  for (const auto& [key, n] : need) {
    for (int k = 0; k < n; ++k) {
      Template t;
      t.job_type = key.first;
      t.assignment = key.second;
      t.cost = cost_of[key];  // from the enumerated copy, not a recompute
      t.tag = TemplateTag::Virtual;
      std::uint64_t id = state.config.add(std::move(t));
      out.actions.push_back({ActionKind::TemplateCreated, key.first, id});
    }
  }

  for (std::size_t j = 0; j < state.waiting.size(); ++j)
    fill_waiting_jobs(state, j, rng, host, /*clock_on_fill=*/true, out.actions);
  return out;
}

inline EventOutcome frame_on_arrival(SystemState& state, int type, RandomStream& rng,
                                     ClockHost& host) {
  EventOutcome out;
  auto j = static_cast<std::size_t>(type);
  std::uint64_t job = state.next_job_id++;
  state.waiting[j].push_back(job);
  state.total_arrivals[j] += 1;
  out.actions.push_back({ActionKind::JobEnqueued, type, 0});
  fill_waiting_jobs(state, j, rng, host, /*clock_on_fill=*/true, out.actions);
  return out;
}

// Service completion: the job departs but its template stays as an idle
// placeholder until the next epoch, immediately refillable.
inline EventOutcome frame_on_departure(SystemState& state, std::uint64_t template_id,
                                       RandomStream& rng, ClockHost& host) {
  EventOutcome out;
  Template& t = state.config.at(template_id);
  auto j = static_cast<std::size_t>(t.job_type);
  state.total_departures[j] += 1;
  out.actions.push_back({ActionKind::JobDeparted, t.job_type, template_id});
  t.job = 0;
  t.clock_id = 0;
  state.config.set_tag(template_id, TemplateTag::Virtual);
  fill_waiting_jobs(state, j, rng, host, /*clock_on_fill=*/true, out.actions);
  return out;
}

}  // namespace gpack
