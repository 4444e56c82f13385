#pragma once

#include <optional>
#include <vector>

#include "gpack/configuration.hpp"
#include "gpack/rng.hpp"

namespace gpack {

// Sequential uniform placement: each node picks a uniformly random remaining
// free slot. Conditioned on success this is uniform over all injective
// placements. Returns nothing when the job does not fit.
inline std::optional<Template> random_partition(const Configuration& config, int type_index,
                                                const JobType& job, const ClusterSpec& cluster,
                                                RandomStream& rng) {
  std::vector<int> free = config.free_slots();
  if (static_cast<int>(free.size()) < job.node_count) return std::nullopt;
  std::vector<int> assignment(job.node_count);
  std::size_t remaining = free.size();
  for (int node = 0; node < job.node_count; ++node) {
    auto pick = static_cast<std::size_t>(
        rng.uniform_int(Sub::Placement, static_cast<std::size_t>(type_index), remaining));
    assignment[node] = free[pick];
    free[pick] = free[--remaining];  // swap-remove
  }
  return make_template(type_index, std::move(assignment), job, cluster);
}

}  // namespace gpack
