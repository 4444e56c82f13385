#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gpack/enumerate.hpp"
#include "gpack/state.hpp"
#include "gpack/weights.hpp"

namespace gpack {

// One line per event. Values are the post-event state; replaying a trace
// therefore reproduces the engine's own integrals exactly (each event's
// pre-state is the previous record's post-state).
struct TraceRecord {
  double time = 0.0;
  std::string kind;  // arrival | departure | proposal | epoch | end
  int job_type = -1;
  std::uint64_t template_id = 0;
  std::string actions;  // comma-joined action names
  std::vector<std::int64_t> queues;
  double cost = 0.0;
  int template_count = 0;
  int config_index = -1;  // index into a ConfigurationSpace, -1 when untracked

  bool operator==(const TraceRecord&) const = default;
};

struct MetricsReport {
  double horizon = 0.0;
  std::uint64_t events = 0;
  std::vector<double> avg_queue;       // per type, full horizon
  std::vector<double> avg_queue_warm;  // per type, after warm-up
  double avg_queue_total = 0.0;
  double avg_queue_total_warm = 0.0;
  double avg_f_sum = 0.0;       // time average of sum_j f(h + Q_j)
  double avg_f_sum_warm = 0.0;
  double avg_cost = 0.0;        // time average of the placed templates' total cost
  double avg_cost_warm = 0.0;
  double avg_template_count = 0.0;
  double first_half_avg_queue = 0.0;   // total queue, [0, H/2)
  double second_half_avg_queue = 0.0;  // total queue, [H/2, H)
  std::uint64_t interruptions = 0;
  std::uint64_t drops = 0;
  std::uint64_t coexistence_violations = 0;
  std::uint64_t conservation_violations = 0;
  std::vector<std::int64_t> final_queue;
  std::map<int, double> config_time;  // space index -> occupancy time
  bool occupancy_tracked = false;

  // Time fraction spent in each configuration of an enumerated space.
  std::vector<double> config_occupancy(std::size_t n_configs) const {
    std::vector<double> out(n_configs, 0.0);
    if (horizon <= 0) return out;
    for (const auto& [idx, t] : config_time)
      if (idx >= 0 && idx < static_cast<int>(n_configs)) out[static_cast<std::size_t>(idx)] = t / horizon;
    return out;
  }

  // Per-template occupancy: fraction of time each template is placed. A
  // template is placed exactly while some tracked configuration contains it.
  std::map<TemplateKey, double> template_occupancy(const ConfigurationSpace& space) const {
    std::map<TemplateKey, double> out;
    if (horizon <= 0) return out;
    for (const auto& [idx, t] : config_time) {
      const ConfigKey& key = space.keys[static_cast<std::size_t>(idx)];
      for (const TemplateKey& tk : key) out[tk] += t / horizon;
    }
    return out;
  }

  bool operator==(const MetricsReport&) const = default;
};

// State snapshot the integrator consumes; both the engine (from live state)
// and the trace replay (from records) build these the same way.
struct MetricsSnapshot {
  std::vector<std::int64_t> queues;
  double cost = 0.0;
  int template_count = 0;
  int config_index = -1;
};

inline MetricsSnapshot snapshot_of(const SystemState& state, int config_index) {
  return {state.queue_vector(), state.config.total_cost(), state.config.total_count(),
          config_index};
}

// Piecewise-constant integrator over event times. Splits segments at the
// warm-up boundary and the horizon midpoint so truncated averages are exact.
class MetricsAccumulator {
 public:
  MetricsAccumulator(std::size_t type_count, double horizon_hint, double warmup_fraction,
                     double h, double b)
      : h_(h),
        b_(b),
        warm_start_(horizon_hint * warmup_fraction),
        half_(horizon_hint / 2.0),
        sum_queue_(type_count, 0.0),
        sum_queue_warm_(type_count, 0.0) {}

  void advance(double to, const MetricsSnapshot& s) {
    if (to < last_) throw MalformedTraceError("time went backwards in metrics integration");
    double cuts[2] = {warm_start_, half_};
    std::sort(cuts, cuts + 2);
    double from = last_;
    for (double c : cuts) {
      if (c > from && c < to) {
        integrate(from, c, s);
        from = c;
      }
    }
    integrate(from, to, s);
    last_ = to;
  }

  void add_event(int interruptions, int drops) {
    events_ += 1;
    interruptions_ += static_cast<std::uint64_t>(interruptions);
    drops_ += static_cast<std::uint64_t>(drops);
  }

  void add_violations(bool coexistence_bad, bool conservation_bad) {
    coexistence_violations_ += coexistence_bad ? 1 : 0;
    conservation_violations_ += conservation_bad ? 1 : 0;
  }

  MetricsReport finish(const MetricsSnapshot& final_state, bool occupancy_tracked) const {
    MetricsReport r;
    r.horizon = last_;
    r.events = events_;
    r.interruptions = interruptions_;
    r.drops = drops_;
    r.coexistence_violations = coexistence_violations_;
    r.conservation_violations = conservation_violations_;
    r.final_queue = final_state.queues;
    r.occupancy_tracked = occupancy_tracked;
    r.config_time = config_time_;

    const double T = last_;
    const std::size_t n = sum_queue_.size();
    r.avg_queue.assign(n, 0.0);
    r.avg_queue_warm.assign(n, 0.0);
    if (T > 0) {
      for (std::size_t j = 0; j < n; ++j) r.avg_queue[j] = sum_queue_[j] / T;
      r.avg_queue_total = total(sum_queue_) / T;
      r.avg_f_sum = sum_f_ / T;
      r.avg_cost = sum_cost_ / T;
      r.avg_template_count = sum_tcount_ / T;
    }
    double warm_len = T - warm_start_;
    if (warm_len > 0) {
      for (std::size_t j = 0; j < n; ++j) r.avg_queue_warm[j] = sum_queue_warm_[j] / warm_len;
      r.avg_queue_total_warm = total(sum_queue_warm_) / warm_len;
      r.avg_f_sum_warm = sum_f_warm_ / warm_len;
      r.avg_cost_warm = sum_cost_warm_ / warm_len;
    }
    if (half_ > 0 && T >= half_) {
      r.first_half_avg_queue = sum_queue_h1_ / half_;
      if (T > half_) r.second_half_avg_queue = sum_queue_h2_ / (T - half_);
    } else if (T > 0) {
      r.first_half_avg_queue = sum_queue_h1_ / T;
    }
    return r;
  }

  double now() const { return last_; }

 private:
  static double total(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }

  void integrate(double from, double to, const MetricsSnapshot& s) {
    double dt = to - from;
    if (dt <= 0) return;
    double qtot = 0.0;
    double fsum = 0.0;
    for (std::size_t j = 0; j < sum_queue_.size(); ++j) {
      auto q = static_cast<double>(s.queues[j]);
      sum_queue_[j] += dt * q;
      qtot += q;
      fsum += f_eval(h_ + q, b_);
    }
    sum_f_ += dt * fsum;
    sum_cost_ += dt * s.cost;
    sum_tcount_ += dt * s.template_count;
    if (s.config_index >= 0) config_time_[s.config_index] += dt;
    if (from >= warm_start_) {
      for (std::size_t j = 0; j < sum_queue_.size(); ++j)
        sum_queue_warm_[j] += dt * static_cast<double>(s.queues[j]);
      sum_f_warm_ += dt * fsum;
      sum_cost_warm_ += dt * s.cost;
    }
    if (to <= half_)
      sum_queue_h1_ += dt * qtot;
    else if (from >= half_)
      sum_queue_h2_ += dt * qtot;
  }

  double h_;
  double b_;
  double warm_start_;
  double half_;
  double last_ = 0.0;
  std::vector<double> sum_queue_, sum_queue_warm_;
  double sum_f_ = 0.0, sum_f_warm_ = 0.0;
  double sum_cost_ = 0.0, sum_cost_warm_ = 0.0;
  double sum_tcount_ = 0.0;
  double sum_queue_h1_ = 0.0, sum_queue_h2_ = 0.0;
  std::map<int, double> config_time_;
  std::uint64_t events_ = 0, interruptions_ = 0, drops_ = 0;
  std::uint64_t coexistence_violations_ = 0, conservation_violations_ = 0;
};

inline int count_occurrences(const std::string& haystack, const std::string& needle) {
  int n = 0;
  std::size_t pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    ++n;
    pos += needle.size();
  }
  return n;
}

// Rebuild a MetricsReport from a trace. With the same horizon hint and
// warm-up fraction this reproduces the originating engine's report exactly.
// The initial state is the empty one: in a tracked trace the empty
// configuration is index 0 by canonical order.
inline MetricsReport summarize_trace(const std::vector<TraceRecord>& trace,
                                     std::size_t type_count, double h, double b,
                                     double horizon_hint, double warmup_fraction) {
  bool tracked = !trace.empty();
  for (const TraceRecord& rec : trace)
    if (rec.config_index < 0) tracked = false;

  MetricsAccumulator acc(type_count, horizon_hint, warmup_fraction, h, b);
  MetricsSnapshot prev;
  prev.queues.assign(type_count, 0);
  prev.config_index = tracked ? 0 : -1;
  bool ended = false;
  for (const TraceRecord& rec : trace) {
    if (ended) throw MalformedTraceError("trace continues past its end record");
    if (rec.queues.size() != type_count)
      throw MalformedTraceError("trace record has a queue vector of the wrong length");
    if (rec.time < acc.now()) throw MalformedTraceError("trace times are not nondecreasing");
    acc.advance(rec.time, prev);
    if (rec.kind == "end") {
      ended = true;
      continue;
    }
    acc.add_event(count_occurrences(rec.actions, action_name(ActionKind::JobInterrupted)),
                  count_occurrences(rec.actions, action_name(ActionKind::JobDropped)));
    prev.queues = rec.queues;
    prev.cost = rec.cost;
    prev.template_count = rec.template_count;
    prev.config_index = rec.config_index;
  }
  return acc.finish(prev, tracked);
}

}  // namespace gpack
