#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "gpack/configuration.hpp"

namespace gpack {

// binom(free, nodes) * nodes!  == number of injective node -> free-slot maps.
// Saturates at uint64 max rather than overflowing.
inline std::uint64_t feasible_template_count(int free_slots, int nodes) {
  if (nodes < 0 || free_slots < 0) throw DomainError("feasible_template_count: negative input");
  if (nodes > free_slots) return 0;
  std::uint64_t out = 1;
  for (int k = 0; k < nodes; ++k) {
    std::uint64_t f = static_cast<std::uint64_t>(free_slots - k);
    if (out > std::numeric_limits<std::uint64_t>::max() / f)
      return std::numeric_limits<std::uint64_t>::max();
    out *= f;
  }
  return out;
}

// Every placement of `job` into the free slots of `config`, ordered
// lexicographically by assignment vector. Empty when the job does not fit.
inline std::vector<Template> enumerate_feasible_templates(const Configuration& config,
                                                          int type_index, const JobType& job,
                                                          const ClusterSpec& cluster) {
  std::vector<int> free = config.free_slots();
  std::vector<Template> out;
  if (static_cast<int>(free.size()) < job.node_count) return out;
  std::vector<int> assignment(job.node_count);
  std::vector<char> used(free.size(), 0);
  // free slots are ascending, so depth-first over positions is lex order
  auto rec = [&](auto&& self, int node) -> void {
    if (node == job.node_count) {
      out.push_back(make_template(type_index, assignment, job, cluster));
      return;
    }
    for (std::size_t i = 0; i < free.size(); ++i) {
      if (used[i]) continue;
      used[i] = 1;
      assignment[node] = free[i];
      self(self, node + 1);
      used[i] = 0;
    }
  };
  rec(rec, 0);
  return out;
}

// The full reachable configuration space for a cluster/job-type pairing,
// canonically ordered: by template count, then by rank sequence over the
// template universe (types ascending, assignments lex within a type).
struct ConfigurationSpace {
  std::vector<Configuration> configs;       // configs[0] is always empty
  std::vector<ConfigKey> keys;              // parallel to configs
  std::map<ConfigKey, int> index;           // key -> position
  std::vector<Template> universe;           // all feasible templates, ranked
  std::vector<std::pair<int, int>> universe_range;  // per type: [begin, end) in universe

  int at(const ConfigKey& k) const {
    auto it = index.find(k);
    if (it == index.end()) throw UnknownTemplateError("configuration space: unknown key");
    return it->second;
  }
  std::size_t size() const { return configs.size(); }
};

inline ConfigurationSpace enumerate_configurations(const ClusterSpec& cluster,
                                                   const std::vector<JobType>& jobs,
                                                   std::uint64_t max_states = 100000) {
  const int M = cluster.total_slots();
  // Each universe template is itself a configuration, so a cheap closed-form
  // census can reject hopeless instances before allocating anything.
  std::uint64_t singletons = 0;
  for (const JobType& j : jobs) {
    std::uint64_t c = feasible_template_count(M, j.node_count);
    if (singletons > std::numeric_limits<std::uint64_t>::max() - c)
      singletons = std::numeric_limits<std::uint64_t>::max();
    else
      singletons += c;
  }
  if (singletons >= max_states)
    throw StateSpaceTooLargeError(
        "configuration enumeration aborted: at least " + std::to_string(singletons + 1) +
            " configurations, limit " + std::to_string(max_states),
        singletons + 1);

  ConfigurationSpace space;
  Configuration empty(M, jobs.size());
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    auto ts = enumerate_feasible_templates(empty, static_cast<int>(j), jobs[j], cluster);
    space.universe_range.emplace_back(static_cast<int>(space.universe.size()),
                                      static_cast<int>(space.universe.size() + ts.size()));
    space.universe.insert(space.universe.end(), ts.begin(), ts.end());
  }

  std::vector<std::vector<int>> sequences;  // universe ranks, strictly increasing
  std::vector<int> current;
  std::vector<char> slot_used(M, 0);
  std::uint64_t count = 1;  // the empty configuration
  auto fits = [&](const Template& t) {
    for (int s : t.assignment)
      if (slot_used[s]) return false;
    return true;
  };
  auto rec = [&](auto&& self, int start) -> void {
    for (int r = start; r < static_cast<int>(space.universe.size()); ++r) {
      const Template& t = space.universe[r];
      if (!fits(t)) continue;
      for (int s : t.assignment) slot_used[s] = 1;
      current.push_back(r);
      if (++count > max_states)
        throw StateSpaceTooLargeError("configuration enumeration aborted at " +
                                          std::to_string(count) + " configurations, limit " +
                                          std::to_string(max_states),
                                      count);
      sequences.push_back(current);
      self(self, r + 1);
      current.pop_back();
      for (int s : t.assignment) slot_used[s] = 0;
    }
  };
  rec(rec, 0);

  std::sort(sequences.begin(), sequences.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });

  space.configs.reserve(sequences.size() + 1);
  space.configs.push_back(empty);
  for (const auto& seq : sequences) {
    Configuration c(M, jobs.size());
    for (int r : seq) c.add(space.universe[r]);
    space.configs.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < space.configs.size(); ++i) {
    space.keys.push_back(space.configs[i].key());
    space.index.emplace(space.keys.back(), static_cast<int>(i));
  }
  return space;
}

}  // namespace gpack
