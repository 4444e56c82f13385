#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gpack/cluster.hpp"
#include "gpack/job.hpp"

namespace gpack {

enum class TemplateTag { Virtual, Actual };

// One placed copy of a job graph: an injective node -> global slot map.
// Virtual templates are placeholders reserved for future arrivals; actual
// ones hold exactly one in-system job.
struct Template {
  int job_type = 0;                // positional index into the job type list
  std::vector<int> assignment;     // node -> global slot
  double cost = 0.0;               // cached cut cost
  TemplateTag tag = TemplateTag::Virtual;
  std::uint64_t job = 0;           // in-system job id; 0 when virtual
  std::uint64_t clock_id = 0;      // engine departure clock handle; 0 if none
};

// Identity of a template up to runtime bookkeeping: (type, assignment).
using TemplateKey = std::pair<int, std::vector<int>>;

inline TemplateKey key_of(const Template& t) { return {t.job_type, t.assignment}; }

inline void check_assignment(const std::vector<int>& assignment, const JobType& job,
                             const ClusterSpec& cluster) {
  if (static_cast<int>(assignment.size()) != job.node_count)
    throw InvalidTemplateError("template: assignment covers " +
                               std::to_string(assignment.size()) + " nodes, job has " +
                               std::to_string(job.node_count));
  std::vector<char> used(cluster.total_slots(), 0);
  for (int s : assignment) {
    if (s < 0 || s >= cluster.total_slots())
      throw InvalidTemplateError("template: slot index " + std::to_string(s) + " out of range");
    if (used[s]) throw InvalidTemplateError("template: assignment is not injective");
    used[s] = 1;
  }
}

// Sum of weights of edges whose endpoints land on different machines.
inline double template_cost(const std::vector<int>& assignment, const JobType& job,
                            const ClusterSpec& cluster) {
  check_assignment(assignment, job, cluster);
  double cost = 0.0;
  for (const Edge& e : job.edges) {
    if (cluster.machine_of(assignment[e.u]) != cluster.machine_of(assignment[e.v]))
      cost += e.weight;
  }
  return cost;
}

inline Template make_template(int job_type, std::vector<int> assignment, const JobType& job,
                              const ClusterSpec& cluster,
                              TemplateTag tag = TemplateTag::Virtual) {
  Template t;
  t.job_type = job_type;
  t.cost = template_cost(assignment, job, cluster);
  t.assignment = std::move(assignment);
  t.tag = tag;
  return t;
}

}  // namespace gpack
