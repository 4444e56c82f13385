#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gpack/engine.hpp"
#include "gpack/exact.hpp"
#include "gpack/jump.hpp"
#include "gpack/scenario.hpp"

namespace gpack {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct RunRecord {
  std::string scenario_id;
  std::string policy;
  std::string engine;
  double beta = 0, alpha = 0, epsilon = 0, h = 0, frame_length = 0;
  std::uint64_t seed = 0;
  std::vector<double> avg_queue;  // per type, post warm-up
  double avg_cost = 0;            // post warm-up
  std::uint64_t interruptions = 0;
  std::uint64_t drops = 0;
  std::optional<double> tv_to_reference;

  double total_queue() const {
    double s = 0;
    for (double q : avg_queue) s += q;
    return s;
  }
};

struct AggregateRecord {
  std::string scenario_id;
  std::string policy;
  std::string engine;
  double beta = 0, alpha = 0, epsilon = 0, h = 0, frame_length = 0;
  std::uint64_t n_runs = 0;
  double mean_queue = 0, queue_halfwidth = 0;
  double mean_cost = 0, cost_halfwidth = 0;
  double mean_interruptions = 0, mean_drops = 0;
};

struct ExperimentResult {
  std::vector<RunRecord> runs;
  std::vector<AggregateRecord> aggregates;
  std::vector<std::pair<std::string, std::vector<TraceRecord>>> traces;  // label -> records
  bool occupancy_tracked = false;
  std::string reference;  // what the tv column compares against, empty if nothing
};

namespace detail {

// Two-sided 95% Student t critical values by degrees of freedom.
inline double t_critical(std::uint64_t df) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                                 2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                                 2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                                 2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
  if (df == 0) return 0.0;
  if (df <= 30) return table[df - 1];
  return 1.96;
}

struct MeanHalfwidth {
  double mean = 0, halfwidth = 0;
};

inline MeanHalfwidth mean_halfwidth(const std::vector<double>& xs) {
  MeanHalfwidth out;
  const auto n = xs.size();
  if (n == 0) return out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(n);
  if (n < 2) return out;
  double ss = 0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  double sd = std::sqrt(ss / static_cast<double>(n - 1));
  out.halfwidth = t_critical(n - 1) * sd / std::sqrt(static_cast<double>(n));
  return out;
}

}  // namespace detail

// Run every (sweep point, seed) pair of a scenario and aggregate per point.
// When the configuration space fits the state budget, runs also report the
// total-variation gap between their occupancy and the matching stationary
// law: the tilted one for fixed-weight runs, the free process for the loss
// engine.
inline ExperimentResult run_experiment(const Scenario& s, bool collect_traces = false) {
  ExperimentResult result;
  std::vector<SchedulerParams> points = expand_sweep(s);

  ConfigurationSpace space;
  bool have_space = false;
  if (s.track_occupancy) {
    try {
      space = enumerate_configurations(s.cluster, s.jobs, s.max_states);
      have_space = true;
    } catch (const StateSpaceTooLargeError&) {
      have_space = false;  // run untracked, tv stays empty
    }
  }
  result.occupancy_tracked = have_space;

  const bool fixed_dgp = s.policy.variant == PolicyVariant::Dgp &&
                         s.policy.mode == WeightMode::Fixed && s.engine != "loss";
  if (have_space && s.engine == "loss") result.reference = "free-process";
  if (have_space && fixed_dgp) result.reference = "tilted-stationary";

  for (const SchedulerParams& params : points) {
    SchedulerPolicy policy = s.policy;
    policy.params = params;

    std::vector<double> ref;
    if (have_space && s.engine == "loss") {
      ref = config_base_measure(space, s.loads()).p;
    } else if (have_space && fixed_dgp) {
      WeightModel wm = policy.weight_model(s.cluster.total_slots());
      ref = closed_form_stationary(
                space, config_base_measure(space, s.loads()),
                [&](const Template& t) { return wm.fixed_weight(t); }, params.beta)
                .p;
    }

    std::vector<double> queues, costs, interruptions, drops;
    for (std::uint64_t seed : s.seeds) {
      EngineOptions opts;
      opts.horizon = s.horizon;
      opts.warmup_fraction = s.warmup_fraction;
      opts.collect_trace = collect_traces;
      opts.max_states = s.max_states;
      opts.space = have_space ? &space : nullptr;

      RunResult run;
      if (s.engine == "continuous")
        run = run_continuous(s.cluster, s.jobs, policy, opts, seed);
      else if (s.engine == "jump")
        run = run_jump_chain(s.cluster, s.jobs, policy, s.steps, opts, seed);
      else
        run = run_loss_system(s.cluster, s.jobs, opts, seed);

      RunRecord rec;
      rec.scenario_id = s.name;
      rec.policy = policy_name(policy.variant);
      rec.engine = s.engine;
      rec.beta = params.beta;
      rec.alpha = params.alpha;
      rec.epsilon = params.epsilon;
      rec.h = params.h;
      rec.frame_length = params.frame_length;
      rec.seed = seed;
      rec.avg_queue = run.report.avg_queue_warm;
      rec.avg_cost = run.report.avg_cost_warm;
      rec.interruptions = run.report.interruptions;
      rec.drops = run.report.drops;
      if (!ref.empty())
        rec.tv_to_reference = total_variation(run.report.config_occupancy(space.size()), ref);
      queues.push_back(rec.total_queue());
      costs.push_back(rec.avg_cost);
      interruptions.push_back(static_cast<double>(rec.interruptions));
      drops.push_back(static_cast<double>(rec.drops));
      result.runs.push_back(std::move(rec));
      if (collect_traces) {
        std::string label = s.name + "_b" + fmt_double(params.beta) + "_s" + std::to_string(seed);
        result.traces.emplace_back(label, std::move(run.trace));
      }
    }

    AggregateRecord agg;
    agg.scenario_id = s.name;
    agg.policy = policy_name(policy.variant);
    agg.engine = s.engine;
    agg.beta = params.beta;
    agg.alpha = params.alpha;
    agg.epsilon = params.epsilon;
    agg.h = params.h;
    agg.frame_length = params.frame_length;
    agg.n_runs = s.seeds.size();
    auto q = detail::mean_halfwidth(queues);
    auto c = detail::mean_halfwidth(costs);
    agg.mean_queue = q.mean;
    agg.queue_halfwidth = q.halfwidth;
    agg.mean_cost = c.mean;
    agg.cost_halfwidth = c.halfwidth;
    agg.mean_interruptions = detail::mean_halfwidth(interruptions).mean;
    agg.mean_drops = detail::mean_halfwidth(drops).mean;
    result.aggregates.push_back(std::move(agg));
  }
  return result;
}

// ---- serialization ----------------------------------------------------

inline const char* kRunsCsvHeader =
    "scenario_id,policy,engine,beta,alpha,epsilon,h,T,seed,avg_queue_per_type,avg_cost,"
    "interruptions,drops,tv_to_reference";

inline void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& runs) {
  out << kRunsCsvHeader << "\n";
  for (const RunRecord& r : runs) {
    out << r.scenario_id << "," << r.policy << "," << r.engine << "," << fmt_double(r.beta)
        << "," << fmt_double(r.alpha) << "," << fmt_double(r.epsilon) << "," << fmt_double(r.h)
        << "," << fmt_double(r.frame_length) << "," << r.seed << ",";
    for (std::size_t j = 0; j < r.avg_queue.size(); ++j) {
      if (j) out << ";";
      out << fmt_double(r.avg_queue[j]);
    }
    out << "," << fmt_double(r.avg_cost) << "," << r.interruptions << "," << r.drops << ",";
    if (r.tv_to_reference) out << fmt_double(*r.tv_to_reference);
    out << "\n";
  }
}

inline const char* kAggregatesCsvHeader =
    "scenario_id,policy,engine,beta,alpha,epsilon,h,T,n_runs,mean_queue,queue_halfwidth,"
    "mean_cost,cost_halfwidth,mean_interruptions,mean_drops";

inline void write_aggregates_csv(std::ostream& out, const std::vector<AggregateRecord>& aggs) {
  out << kAggregatesCsvHeader << "\n";
  for (const AggregateRecord& a : aggs) {
    out << a.scenario_id << "," << a.policy << "," << a.engine << "," << fmt_double(a.beta)
        << "," << fmt_double(a.alpha) << "," << fmt_double(a.epsilon) << "," << fmt_double(a.h)
        << "," << fmt_double(a.frame_length) << "," << a.n_runs << ","
        << fmt_double(a.mean_queue) << "," << fmt_double(a.queue_halfwidth) << ","
        << fmt_double(a.mean_cost) << "," << fmt_double(a.cost_halfwidth) << ","
        << fmt_double(a.mean_interruptions) << "," << fmt_double(a.mean_drops) << "\n";
  }
}

inline void write_trace_jsonl(std::ostream& out, const std::vector<TraceRecord>& trace) {
  for (const TraceRecord& r : trace) {
    json line;
    line["time"] = r.time;
    line["kind"] = r.kind;
    line["type"] = r.job_type;
    line["template"] = r.template_id;
    line["actions"] = r.actions;
    line["queues"] = r.queues;
    line["cost"] = r.cost;
    line["templates"] = r.template_count;
    line["config"] = r.config_index;
    out << line.dump() << "\n";
  }
}

inline std::vector<TraceRecord> parse_trace_jsonl(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw MalformedTraceError("trace line " + std::to_string(lineno) + ": " + e.what());
    }
    TraceRecord r;
    try {
      r.time = doc.at("time").get<double>();
      r.kind = doc.at("kind").get<std::string>();
      r.job_type = doc.at("type").get<int>();
      r.template_id = doc.at("template").get<std::uint64_t>();
      r.actions = doc.at("actions").get<std::string>();
      r.queues = doc.at("queues").get<std::vector<std::int64_t>>();
      r.cost = doc.at("cost").get<double>();
      r.template_count = doc.at("templates").get<int>();
      r.config_index = doc.at("config").get<int>();
    } catch (const json::exception& e) {
      throw MalformedTraceError("trace line " + std::to_string(lineno) +
                                " is missing fields: " + e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace gpack
