#pragma once

#include <compare>
#include <string>
#include <unordered_map>
#include <vector>

#include "gpack/errors.hpp"

namespace gpack {

// A slot named by (machine id, local slot index). Purely for I/O; internally
// everything runs on flat global slot indices.
struct SlotId {
  int machine = 0;
  int slot = 0;
  auto operator<=>(const SlotId&) const = default;
};

// Machines with identical slots. Slot k of machine i gets the global index
// first_slot[i] + k; machines keep their declaration order.
class ClusterSpec {
 public:
  struct Machine {
    int id = 0;
    int slot_count = 0;
  };

  explicit ClusterSpec(std::vector<Machine> machines) : machines_(std::move(machines)) {
    if (machines_.empty()) throw ValidationError("cluster: at least one machine required");
    int next = 0;
    for (std::size_t i = 0; i < machines_.size(); ++i) {
      const Machine& m = machines_[i];
      if (m.slot_count <= 0)
        throw ValidationError("cluster: machine " + std::to_string(m.id) +
                              " must have a positive slot count");
      if (!ordinal_by_id_.emplace(m.id, static_cast<int>(i)).second)
        throw ValidationError("cluster: duplicate machine id " + std::to_string(m.id));
      first_slot_.push_back(next);
      for (int k = 0; k < m.slot_count; ++k) machine_of_.push_back(static_cast<int>(i));
      next += m.slot_count;
    }
  }

  int total_slots() const { return static_cast<int>(machine_of_.size()); }
  int machine_count() const { return static_cast<int>(machines_.size()); }
  const std::vector<Machine>& machines() const { return machines_; }

  // Machine ordinal (position in declaration order) owning a global slot.
  int machine_of(int slot) const {
    check_slot(slot);
    return machine_of_[slot];
  }

  SlotId slot_id(int slot) const {
    check_slot(slot);
    int ord = machine_of_[slot];
    return SlotId{machines_[ord].id, slot - first_slot_[ord]};
  }

  int global_index(SlotId id) const {
    auto it = ordinal_by_id_.find(id.machine);
    if (it == ordinal_by_id_.end())
      throw ValidationError("cluster: unknown machine id " + std::to_string(id.machine));
    int ord = it->second;
    if (id.slot < 0 || id.slot >= machines_[ord].slot_count)
      throw ValidationError("cluster: slot " + std::to_string(id.slot) +
                            " out of range on machine " + std::to_string(id.machine));
    return first_slot_[ord] + id.slot;
  }

  int first_slot_of(int ordinal) const { return first_slot_[ordinal]; }

 private:
  void check_slot(int slot) const {
    if (slot < 0 || slot >= total_slots())
      throw ValidationError("cluster: global slot index " + std::to_string(slot) +
                            " out of range");
  }

  std::vector<Machine> machines_;
  std::vector<int> machine_of_;
  std::vector<int> first_slot_;
  std::unordered_map<int, int> ordinal_by_id_;
};

}  // namespace gpack
