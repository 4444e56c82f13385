#pragma once

#include <vector>

#include "gpack/dgp.hpp"
#include "gpack/engine.hpp"
#include "gpack/metrics.hpp"
#include "gpack/roundrobin.hpp"

namespace gpack {

// Uniformization constant: with sum_j (lambda_j + count_j(C) mu_j) bounded by
// half of this, the embedded chain is lazy (self-loop mass >= 1/2).
inline double jump_uniformization_rate(const std::vector<JobType>& jobs, int total_slots) {
  double lam = 0.0, mu = 0.0;
  for (const JobType& j : jobs) {
    lam += j.arrival_rate;
    mu += j.service_rate;
  }
  return 2.0 * (lam + total_slots * mu);
}

// Discrete-time mirror of the continuous run: one uniformized step per unit.
// Supports the queue-driven policy (live or fixed weights) and round-robin;
// the dedicated-clock and frame-based variants have no uniformizable jump
// chain (state-dependent clock rates, wall-clock epochs).
inline RunResult run_jump_chain(const ClusterSpec& cluster, const std::vector<JobType>& jobs,
                                const SchedulerPolicy& policy, std::uint64_t steps,
                                const EngineOptions& opts, std::uint64_t seed) {
  policy.params.validate();
  if (policy.variant == PolicyVariant::Adgp || policy.variant == PolicyVariant::FrameBased)
    throw ValidationError("jump chain: only the queue-driven policy and round-robin uniformize");

  const int M = cluster.total_slots();
  const auto J = jobs.size();
  const double xi = jump_uniformization_rate(jobs, M);
  if (!(xi > 0)) throw ValidationError("jump chain: all rates are zero");

  SystemState state(M, J);
  RandomStream rng(seed);
  NullClockHost host;
  WeightModel wm = policy.weight_model(M);
  RoundRobinCursor cursor;
  MetricsAccumulator acc(J, static_cast<double>(steps), opts.warmup_fraction, policy.params.h,
                         policy.params.b);
  RunResult result;

  auto config_index = [&]() -> int {
    if (opts.space == nullptr) return -1;
    auto it = opts.space->index.find(state.config.key());
    return it == opts.space->index.end() ? -1 : it->second;
  };

  for (std::uint64_t k = 1; k <= steps; ++k) {
    state.clock = static_cast<double>(k);

    double u = rng.u01(Sub::Jump, 0);
    double cum = 0.0;
    int arrival_type = -1;
    std::uint64_t departing = 0;
    int departure_type = -1;
    for (std::size_t j = 0; j < J && arrival_type < 0; ++j) {
      cum += jobs[j].arrival_rate / xi;
      if (u < cum) arrival_type = static_cast<int>(j);
    }
    if (arrival_type < 0) {
      for (std::size_t j = 0; j < J && departure_type < 0; ++j) {
        cum += state.config.count(j) * jobs[j].service_rate / xi;
        if (u < cum) {
          departure_type = static_cast<int>(j);
          // uniform among this type's templates, ascending id order
          auto n = static_cast<std::uint64_t>(state.config.count(j));
          std::uint64_t pick = n > 1 ? rng.uniform_int(Sub::Departures, j, n) : 0;
          std::uint64_t seen = 0;
          for (const auto& [id, t] : state.config.templates()) {
            if (t.job_type != departure_type) continue;
            if (seen++ == pick) {
              departing = id;
              break;
            }
          }
        }
      }
    }

    if (arrival_type < 0 && departure_type < 0)
      continue;  // lazy step: state unchanged, no event recorded
    // integrate only up to event steps so a trace replay, which sees only
    // these instants, reproduces the sums with identical arithmetic
    acc.advance(static_cast<double>(k), snapshot_of(state, config_index()));

    EventOutcome outcome;
    const char* kind;
    if (arrival_type >= 0) {
      kind = "arrival";
      outcome = policy.variant == PolicyVariant::RoundRobin
                    ? rr_on_arrival(state, arrival_type, jobs, cluster, cursor, rng, host)
                    : dgp_on_arrival(state, arrival_type, jobs, cluster, wm, rng, host);
    } else {
      kind = "departure";
      outcome = policy.variant == PolicyVariant::RoundRobin
                    ? rr_on_departure(state, departing, jobs, cluster, cursor, rng, host)
                    : dgp_on_departure(state, departing, wm, rng, host);
    }

    acc.add_event(outcome.interruptions, outcome.drops);
    acc.add_violations(policy.variant != PolicyVariant::RoundRobin &&
                           detail::coexistence_violated(state),
                       !state.conserved());
    if (opts.collect_trace) {
      TraceRecord rec;
      rec.time = static_cast<double>(k);
      rec.kind = kind;
      rec.job_type = arrival_type >= 0 ? arrival_type : departure_type;
      rec.template_id = departing;
      rec.actions = detail::join_actions(outcome.actions);
      rec.queues = state.queue_vector();
      rec.cost = state.config.total_cost();
      rec.template_count = state.config.total_count();
      rec.config_index = config_index();
      result.trace.push_back(std::move(rec));
    }
  }

  acc.advance(static_cast<double>(steps), snapshot_of(state, config_index()));
  if (opts.collect_trace) {
    TraceRecord rec;
    rec.time = static_cast<double>(steps);
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
