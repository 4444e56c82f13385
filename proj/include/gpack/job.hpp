#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gpack/errors.hpp"

namespace gpack {

struct Edge {
  int u = 0;
  int v = 0;
  double weight = 1.0;
};

// A job class: an undirected weighted graph plus Poisson arrival rate and
// exponential service rate. `id` is the external name; code indexes job
// types positionally in the scenario's declaration order.
struct JobType {
  int id = 0;
  int node_count = 0;
  std::vector<Edge> edges;
  double arrival_rate = 0.0;  // lambda
  double service_rate = 1.0;  // mu

  double load() const { return arrival_rate / service_rate; }
};

// All violations, not just the first; empty means valid. `label` prefixes
// messages so scenario loading can point at the offending entry.
inline std::vector<std::string> validate_job_type(const JobType& j, int total_slots,
                                                  const std::string& label) {
  std::vector<std::string> out;
  if (j.node_count < 1) out.push_back(label + ": node_count must be >= 1");
  if (total_slots > 0 && j.node_count >= total_slots)
    out.push_back(label + ": node_count (" + std::to_string(j.node_count) +
                  ") must be strictly less than the total slot count (" +
                  std::to_string(total_slots) + ")");
  if (j.arrival_rate < 0) out.push_back(label + ": arrival_rate must be >= 0");
  if (!(j.service_rate > 0)) out.push_back(label + ": service_rate must be > 0");
  std::set<std::pair<int, int>> seen;
  for (std::size_t e = 0; e < j.edges.size(); ++e) {
    const Edge& ed = j.edges[e];
    std::string el = label + ".edges[" + std::to_string(e) + "]";
    if (ed.u < 0 || ed.u >= j.node_count || ed.v < 0 || ed.v >= j.node_count) {
      out.push_back(el + ": endpoint out of range [0, " + std::to_string(j.node_count) + ")");
      continue;
    }
    if (ed.u == ed.v) {
      out.push_back(el + ": self-loop not allowed");
      continue;
    }
    if (ed.weight < 0) out.push_back(el + ": weight must be >= 0");
    auto key = std::minmax(ed.u, ed.v);
    if (!seen.insert(key).second) out.push_back(el + ": duplicate undirected edge");
  }
  return out;
}

}  // namespace gpack
