#pragma once

#include <vector>

#include "gpack/cluster.hpp"
#include "gpack/configuration.hpp"
#include "gpack/job.hpp"
#include "gpack/rng.hpp"

namespace gpack::test {

// 1 machine, 2 slots, one single-node type at unit rates.
inline ClusterSpec tiny_cluster() { return ClusterSpec({{0, 2}}); }

inline std::vector<JobType> tiny_jobs(double lambda = 1.0, double mu = 1.0) {
  JobType j;
  j.id = 0;
  j.node_count = 1;
  j.arrival_rate = lambda;
  j.service_rate = mu;
  return {j};
}

// 2 machines x 2 slots, one 3-node path (edges 0-1, 1-2) at unit rates.
inline ClusterSpec quad_cluster() { return ClusterSpec({{0, 2}, {1, 2}}); }

inline std::vector<JobType> path3_jobs(double lambda = 1.0, double mu = 1.0) {
  JobType j;
  j.id = 0;
  j.node_count = 3;
  j.edges = {{0, 1, 1.0}, {1, 2, 1.0}};
  j.arrival_rate = lambda;
  j.service_rate = mu;
  return {j};
}

// 2 machines x 2 slots, one 2-node edge type; default load 1.6 of capacity 2.
inline std::vector<JobType> pair_jobs(double lambda = 1.6, double mu = 1.0) {
  JobType j;
  j.id = 0;
  j.node_count = 2;
  j.edges = {{0, 1, 1.0}};
  j.arrival_rate = lambda;
  j.service_rate = mu;
  return {j};
}

// Brute-force oracle for feasible placements: scans every node -> slot tuple
// and keeps the injective ones landing on free slots. Deliberately a
// different algorithm from the library's.
inline std::vector<std::vector<int>> all_placements_oracle(const Configuration& config,
                                                           int nodes) {
  const int M = config.total_slots();
  std::vector<std::vector<int>> out;
  std::vector<int> tuple(static_cast<std::size_t>(nodes), 0);
  for (;;) {
    bool ok = true;
    for (int i = 0; i < nodes && ok; ++i) {
      if (!config.slot_free(tuple[static_cast<std::size_t>(i)])) ok = false;
      for (int k = 0; k < i && ok; ++k)
        if (tuple[static_cast<std::size_t>(k)] == tuple[static_cast<std::size_t>(i)]) ok = false;
    }
    if (ok) out.push_back(tuple);
    int pos = nodes - 1;
    while (pos >= 0 && tuple[static_cast<std::size_t>(pos)] == M - 1)
      tuple[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
    tuple[static_cast<std::size_t>(pos)] += 1;
  }
  return out;
}

}  // namespace gpack::test
