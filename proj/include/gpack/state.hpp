#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "gpack/configuration.hpp"

namespace gpack {

enum class ActionKind {
  JobEnqueued,
  JobStarted,
  JobDeparted,
  JobInterrupted,
  JobDropped,
  TemplateCreated,
  TemplateDestroyed,
  TemplateRejected,
};

inline const char* action_name(ActionKind k) {
  switch (k) {
    case ActionKind::JobEnqueued: return "job-enqueued";
    case ActionKind::JobStarted: return "job-started";
    case ActionKind::JobDeparted: return "job-departed";
    case ActionKind::JobInterrupted: return "job-interrupted";
    case ActionKind::JobDropped: return "job-dropped";
    case ActionKind::TemplateCreated: return "template-created";
    case ActionKind::TemplateDestroyed: return "template-destroyed";
    case ActionKind::TemplateRejected: return "template-rejected";
  }
  return "?";
}

struct Action {
  ActionKind kind;
  int job_type = -1;
  std::uint64_t template_id = 0;  // 0 when not about a template
};

struct EventOutcome {
  std::vector<Action> actions;
  int interruptions = 0;
  int drops = 0;
};

// Full scheduler state: the placed templates plus per-type FIFO queues of
// jobs that have no template yet. Queue length counts waiting jobs and jobs
// in service (actual templates).
struct SystemState {
  double clock = 0.0;
  Configuration config;
  std::vector<std::deque<std::uint64_t>> waiting;  // job ids, FIFO per type
  std::vector<std::uint64_t> total_arrivals;
  std::vector<std::uint64_t> total_departures;
  std::uint64_t next_job_id = 1;

  SystemState(int total_slots, std::size_t type_count)
      : config(total_slots, type_count),
        waiting(type_count),
        total_arrivals(type_count, 0),
        total_departures(type_count, 0) {}

  std::int64_t queue(std::size_t j) const {
    return static_cast<std::int64_t>(waiting[j].size()) + config.actual_count(j);
  }

  std::vector<std::int64_t> queue_vector() const {
    std::vector<std::int64_t> q(waiting.size());
    for (std::size_t j = 0; j < waiting.size(); ++j) q[j] = queue(j);
    return q;
  }

  // Conservation: everything that arrived is waiting, in service, or gone.
  bool conserved() const {
    for (std::size_t j = 0; j < waiting.size(); ++j) {
      if (static_cast<std::uint64_t>(queue(j)) + total_departures[j] != total_arrivals[j])
        return false;
    }
    return true;
  }
};

}  // namespace gpack
