#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "gpack/rng.hpp"
#include "gpack/state.hpp"
#include "gpack/weights.hpp"

namespace gpack {

enum class PolicyVariant { Dgp, Adgp, FrameBased, RoundRobin };
enum class WeightMode { Live, Fixed };

inline const char* policy_name(PolicyVariant v) {
  switch (v) {
    case PolicyVariant::Dgp: return "dgp";
    case PolicyVariant::Adgp: return "adgp";
    case PolicyVariant::FrameBased: return "frame";
    case PolicyVariant::RoundRobin: return "round-robin";
  }
  return "?";
}

// Template weight source. Live mode evaluates the urgency-minus-cost weight
// at the current queue vector; fixed mode reads a frozen table. For the
// dedicated-clock variant the fixed per-type value is the frozen queue term
// g_j (weight of template A is then g_j - cost(A)); for the queue-driven
// variant fixed values are full template weights.
class WeightModel {
 public:
  static WeightModel live(const SchedulerParams& p, int total_slots) {
    WeightModel m;
    m.mode_ = WeightMode::Live;
    m.params_ = p;
    m.total_slots_ = total_slots;
    return m;
  }

  static WeightModel fixed_per_type(std::vector<double> values, const SchedulerParams& p) {
    WeightModel m;
    m.mode_ = WeightMode::Fixed;
    m.params_ = p;
    m.per_type_ = std::move(values);
    return m;
  }

  static WeightModel fixed_table(std::map<TemplateKey, double> table, const SchedulerParams& p) {
    WeightModel m;
    m.mode_ = WeightMode::Fixed;
    m.params_ = p;
    m.table_ = std::move(table);
    return m;
  }

  WeightMode mode() const { return mode_; }
  const SchedulerParams& params() const { return params_; }

  double weight(const Template& t, const SystemState& state) const {
    if (mode_ == WeightMode::Live) {
      std::vector<std::int64_t> q = state.queue_vector();
      return tilde_weight(static_cast<std::size_t>(t.job_type), t.cost, q, params_,
                          total_slots_);
    }
    return fixed_weight(t);
  }

  // Fixed-mode weight without state (exact analysis path).
  double fixed_weight(const Template& t) const {
    if (mode_ != WeightMode::Fixed)
      throw ValidationError("weight model: fixed weight requested from live model");
    if (!per_type_.empty()) {
      if (t.job_type < 0 || t.job_type >= static_cast<int>(per_type_.size()))
        throw ValidationError("weight model: type index outside fixed table");
      return per_type_[static_cast<std::size_t>(t.job_type)] - table_cost_offset(t);
    }
    auto it = table_.find(key_of(t));
    if (it == table_.end())
      throw ValidationError("weight model: template missing from fixed table");
    return it->second;
  }

  // Per-type mode doubles as the dedicated-clock frozen queue term; for the
  // queue-driven variant the value is the full weight, so no cost offset.
  void set_per_type_is_queue_term(bool v) { per_type_queue_term_ = v; }
  bool per_type_is_queue_term() const { return per_type_queue_term_; }

  double queue_term(std::size_t j, const SystemState& state) const {
    if (mode_ == WeightMode::Live) {
      std::vector<std::int64_t> q = state.queue_vector();
      std::vector<double> x(q.size());
      for (std::size_t k = 0; k < q.size(); ++k) x[k] = params_.h + static_cast<double>(q[k]);
      return params_.alpha * f_group(j, x, params_.b, params_.epsilon, total_slots_);
    }
    if (per_type_.empty() || !per_type_queue_term_)
      throw ValidationError(
          "weight model: dedicated-clock variant needs live weights or per-type queue terms");
    return per_type_[j];
  }

 private:
  double table_cost_offset(const Template& t) const { return per_type_queue_term_ ? t.cost : 0.0; }

  WeightMode mode_ = WeightMode::Live;
  SchedulerParams params_;
  int total_slots_ = 0;
  std::vector<double> per_type_;
  std::map<TemplateKey, double> table_;
  bool per_type_queue_term_ = false;
};

// Scheduling policy selection as it appears in scenarios.
struct SchedulerPolicy {
  PolicyVariant variant = PolicyVariant::Dgp;
  WeightMode mode = WeightMode::Live;
  SchedulerParams params;
  std::vector<double> fixed_per_type;           // fixed mode, per-type values
  std::map<TemplateKey, double> fixed_table;    // fixed mode, per-template weights

  WeightModel weight_model(int total_slots) const {
    if (mode == WeightMode::Live) return WeightModel::live(params, total_slots);
    if (!fixed_per_type.empty()) {
      WeightModel m = WeightModel::fixed_per_type(fixed_per_type, params);
      m.set_per_type_is_queue_term(variant == PolicyVariant::Adgp);
      return m;
    }
    return WeightModel::fixed_table(fixed_table, params);
  }
};

// Interface the engine hands to policy handlers for departure clocks.
// schedule_departure draws the service clock and returns its handle.
class ClockHost {
 public:
  virtual std::uint64_t schedule_departure(int type, std::uint64_t template_id) = 0;
  virtual void cancel(std::uint64_t clock_id) = 0;
  virtual ~ClockHost() = default;
};

// A host for contexts without real clocks (jump chain, handler unit tests).
class NullClockHost : public ClockHost {
 public:
  std::uint64_t schedule_departure(int, std::uint64_t) override { return 0; }
  void cancel(std::uint64_t) override {}
};

// Move waiting jobs into idle virtual templates of their type, head of queue
// first, choosing uniformly among the idle templates. The template keeps its
// departure clock unless the policy draws service clocks at fill time.
inline void fill_waiting_jobs(SystemState& state, std::size_t type, RandomStream& rng,
                              ClockHost& host, bool clock_on_fill,
                              std::vector<Action>& actions) {
  while (!state.waiting[type].empty() && state.config.virtual_count(type) > 0) {
    std::vector<std::uint64_t> ids = state.config.virtual_ids(type);
    std::size_t pick = 0;
    if (ids.size() > 1)
      pick = static_cast<std::size_t>(rng.uniform_int(Sub::Fill, type, ids.size()));
    std::uint64_t id = ids[pick];
    std::uint64_t job = state.waiting[type].front();
    state.waiting[type].pop_front();
    state.config.set_tag(id, TemplateTag::Actual);
    Template& t = state.config.at(id);
    t.job = job;
    if (clock_on_fill) t.clock_id = host.schedule_departure(static_cast<int>(type), id);
    actions.push_back({ActionKind::JobStarted, static_cast<int>(type), id});
  }
}

// Freeze live weights into a per-template table at a queue snapshot.
inline std::map<TemplateKey, double> freeze_live_weights(std::span<const Template> universe,
                                                         std::span<const std::int64_t> queues,
                                                         const SchedulerParams& p,
                                                         int total_slots) {
  std::map<TemplateKey, double> out;
  for (const Template& t : universe)
    out[key_of(t)] =
        tilde_weight(static_cast<std::size_t>(t.job_type), t.cost, queues, p, total_slots);
  return out;
}

}  // namespace gpack
