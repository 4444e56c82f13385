#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gpack/templates.hpp"

namespace gpack {

// Canonical identity of a configuration: the sorted multiset (a set, since
// assignments are slot-disjoint) of template keys. Orders lexicographically,
// so it can key a std::map directly.
using ConfigKey = std::vector<TemplateKey>;

// A slot-disjoint set of templates with stable numeric ids. Ids are assigned
// in insertion order and never reused, so iteration over `templates()` is
// deterministic for a fixed action sequence.
class Configuration {
 public:
  Configuration(int total_slots, std::size_t type_count)
      : slot_owner_(total_slots, 0),
        count_(type_count, 0),
        actual_count_(type_count, 0),
        free_(total_slots) {}

  std::uint64_t add(Template t) {
    for (int s : t.assignment) {
      if (s < 0 || s >= static_cast<int>(slot_owner_.size()))
        throw InvalidTemplateError("configuration: slot index out of range");
      if (slot_owner_[s] != 0)
        throw SlotCollisionError("configuration: slot " + std::to_string(s) +
                                 " already occupied by template " +
                                 std::to_string(slot_owner_[s]));
    }
    std::uint64_t id = next_id_++;
    for (int s : t.assignment) slot_owner_[s] = id;
    free_ -= static_cast<int>(t.assignment.size());
    count_[t.job_type] += 1;
    if (t.tag == TemplateTag::Actual) actual_count_[t.job_type] += 1;
    total_cost_ += t.cost;
    templates_.emplace(id, std::move(t));
    return id;
  }

  Template remove(std::uint64_t id) {
    auto it = templates_.find(id);
    if (it == templates_.end())
      throw UnknownTemplateError("configuration: no template with id " + std::to_string(id));
    Template t = std::move(it->second);
    templates_.erase(it);
    for (int s : t.assignment) slot_owner_[s] = 0;
    free_ += static_cast<int>(t.assignment.size());
    count_[t.job_type] -= 1;
    if (t.tag == TemplateTag::Actual) actual_count_[t.job_type] -= 1;
    total_cost_ -= t.cost;
    return t;
  }

  void set_tag(std::uint64_t id, TemplateTag tag) {
    Template& t = at(id);
    if (t.tag == tag) return;
    actual_count_[t.job_type] += (tag == TemplateTag::Actual) ? 1 : -1;
    t.tag = tag;
  }

  const Template& at(std::uint64_t id) const {
    auto it = templates_.find(id);
    if (it == templates_.end())
      throw UnknownTemplateError("configuration: no template with id " + std::to_string(id));
    return it->second;
  }

  Template& at(std::uint64_t id) {
    auto it = templates_.find(id);
    if (it == templates_.end())
      throw UnknownTemplateError("configuration: no template with id " + std::to_string(id));
    return it->second;
  }

  bool contains(std::uint64_t id) const { return templates_.count(id) != 0; }

  const std::map<std::uint64_t, Template>& templates() const { return templates_; }

  int count(std::size_t type) const { return count_[type]; }
  int actual_count(std::size_t type) const { return actual_count_[type]; }
  int virtual_count(std::size_t type) const { return count_[type] - actual_count_[type]; }
  int total_count() const { return static_cast<int>(templates_.size()); }

  int total_slots() const { return static_cast<int>(slot_owner_.size()); }
  std::size_t type_count() const { return count_.size(); }
  int free_slot_count() const { return free_; }
  bool slot_free(int slot) const { return slot_owner_[slot] == 0; }

  std::vector<int> free_slots() const {
    std::vector<int> out;
    out.reserve(free_);
    for (int s = 0; s < static_cast<int>(slot_owner_.size()); ++s)
      if (slot_owner_[s] == 0) out.push_back(s);
    return out;
  }

  // Virtual template ids of a type, ascending (i.e. creation order).
  std::vector<std::uint64_t> virtual_ids(std::size_t type) const {
    std::vector<std::uint64_t> out;
    for (const auto& [id, t] : templates_)
      if (t.job_type == static_cast<int>(type) && t.tag == TemplateTag::Virtual)
        out.push_back(id);
    return out;
  }

  double total_cost() const { return total_cost_; }

  ConfigKey key() const {
    ConfigKey k;
    k.reserve(templates_.size());
    for (const auto& [id, t] : templates_) k.push_back(key_of(t));
    std::sort(k.begin(), k.end());
    return k;
  }

 private:
  std::map<std::uint64_t, Template> templates_;
  std::vector<std::uint64_t> slot_owner_;  // 0 = free
  std::vector<int> count_;
  std::vector<int> actual_count_;
  int free_ = 0;
  double total_cost_ = 0.0;
  std::uint64_t next_id_ = 1;
};

inline std::string format_config_key(const ConfigKey& key) {
  std::string out = "{";
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (i) out += " ";
    out += "t" + std::to_string(key[i].first) + ":[";
    for (std::size_t k = 0; k < key[i].second.size(); ++k) {
      if (k) out += ",";
      out += std::to_string(key[i].second[k]);
    }
    out += "]";
  }
  out += "}";
  return out;
}

}  // namespace gpack
